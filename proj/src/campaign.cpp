#include "sntt/campaign.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sntt {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::v512:
      return "512";
    case Variant::v768:
      return "768";
    case Variant::v1024:
      return "1024";
  }
  return "?";
}

const char* to_string(StuckPolicy s) {
  switch (s) {
    case StuckPolicy::zero:
      return "zero";
    case StuckPolicy::one:
      return "one";
    case StuckPolicy::both:
      return "both";
  }
  return "?";
}

const char* to_string(MaskMode m) {
  switch (m) {
    case MaskMode::per_write:
      return "per-write";
    case MaskMode::per_run:
      return "per-run";
    case MaskMode::off:
      return "off";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  const std::string t = (!s.empty() && (s[0] == 'v' || s[0] == 'V'))
                            ? s.substr(1)
                            : s;
  if (t == "512") return Variant::v512;
  if (t == "768") return Variant::v768;
  if (t == "1024") return Variant::v1024;
  throw std::invalid_argument("unknown variant: " + s);
}

StuckPolicy stuck_from_string(const std::string& s) {
  if (s == "0" || s == "zero") return StuckPolicy::zero;
  if (s == "1" || s == "one") return StuckPolicy::one;
  if (s == "both") return StuckPolicy::both;
  throw std::invalid_argument("unknown stuck-at policy: " + s);
}

MaskMode mask_from_string(const std::string& s) {
  if (s == "per-write") return MaskMode::per_write;
  if (s == "per-run") return MaskMode::per_run;
  if (s == "off") return MaskMode::off;
  throw std::invalid_argument("unknown mask mode: " + s);
}

unsigned module_rank(Variant v) {
  switch (v) {
    case Variant::v512:
      return 2;
    case Variant::v768:
      return 3;
    case Variant::v1024:
      return 4;
  }
  return 2;
}

std::vector<BlockRow> kem_blocks(Variant v) {
  const std::uint64_t k = module_rank(v);
  return {
      {"keygen", "ntt_s", k},   {"keygen", "ntt_e", k},
      {"keygen", "intt_acc", 0},
      {"encap", "ntt_r", k},    {"encap", "intt_ar", k},
      {"encap", "intt_tr", 1},
      {"decap", "ntt_u", k},    {"decap", "intt_su", 1},
      {"decap", "ntt_r", k},    {"decap", "intt_ar", k},
      {"decap", "intt_tr", 1},
  };
}

void CampaignConfig::validate() const {
  if (samples == 0) throw std::invalid_argument("campaign: samples must be >= 1");
  if (slots == 0) throw std::invalid_argument("campaign: slots must be >= 1");
  if (max_attempts == 0) {
    throw std::invalid_argument("campaign: max_attempts must be >= 1");
  }
  if (w_flagged < 0.0 || w_uncorrected < 0.0 ||
      w_flagged + w_uncorrected <= 0.0) {
    throw std::invalid_argument("campaign: invalid risk weights");
  }
  thresholds.validate();
}

double detection_pct(const BlockStats& b) {
  return b.effective == 0 ? 100.0
                          : 100.0 * static_cast<double>(b.detected) /
                                static_cast<double>(b.effective);
}

double correction_pct(const BlockStats& b) {
  return b.effective == 0 ? 100.0
                          : 100.0 * static_cast<double>(b.corrected) /
                                static_cast<double>(b.effective);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t run_stream_seed(std::uint64_t master, std::uint64_t run_index) {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (run_index + 1));
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.validate();

  const NttParams params = NttParams::kyber();
  const GoldenSegment golden = golden_segment(params.n, 0);
  // The trigger field is 10 bits wide, so plans land in the first 1024 cycles
  // of the schedule (which covers all but the drain tail).
  const std::uint64_t trigger_span =
      std::min<std::uint64_t>(1024, golden.raw_cycles);

  PatcherTable table(cfg.slots, cfg.w_flagged, cfg.w_uncorrected);
  Corrector corrector(&table, cfg.thresholds, cfg.latencies);

  CampaignResult result;
  result.config = cfg;

  double fraction_sum = 0.0;
  std::uint64_t run_index = 0;

  for (const BlockRow& row : kem_blocks(cfg.variant)) {
    BlockStats stats;
    stats.phase = row.phase;
    stats.name = row.name;
    stats.count_per_sample = row.count;

    for (std::size_t sample = 0; sample < cfg.samples; ++sample) {
      for (std::uint64_t rep = 0; rep < row.count; ++rep) {
        const std::uint64_t seed = run_stream_seed(cfg.seed, run_index);
        ++run_index;
        std::mt19937_64 rng(seed);

        Polynomial input(params.n);
        for (Residue& c : input) {
          c = static_cast<Residue>(rng() % params.q);
        }

        FaultPlan plan;
        plan.r_t = static_cast<std::uint32_t>(rng() % trigger_span);
        plan.r_s = static_cast<std::uint32_t>(rng() % 1024);
        switch (cfg.stuck) {
          case StuckPolicy::zero:
            plan.mode = StuckAt::zero;
            break;
          case StuckPolicy::one:
            plan.mode = StuckAt::one;
            break;
          case StuckPolicy::both:
            plan.mode = (rng() % 2 == 0) ? StuckAt::zero : StuckAt::one;
            break;
        }
        plan.persistence = Persistence::single_cycle;
        plan.slot_scope = *table.select_slot();

        const bool effective = is_effective(plan, golden.stream);

        RunConfig rc;
        rc.mask_mode = cfg.mask;
        rc.monitors_enabled = cfg.monitors;
        rc.seed = seed;
        rc.slot = plan.slot_scope;
        rc.max_attempts = cfg.max_attempts;

        const RunOutcome outcome = run_transform(
            params, input, {FaultSpec{plan, false}}, rc, &corrector);

        const Polynomial reference = ntt_behavioral(input, params);
        const bool correct =
            outcome.completed && outcome.output_raw == reference;

        ++stats.runs;
        if (effective) {
          ++stats.effective;
          if (outcome.detected) ++stats.detected;
          if (correct) ++stats.corrected;
        } else if (outcome.detected) {
          ++stats.false_positives;
        }
        if (!correct) table.record_uncorrected(plan.slot_scope);

        for (const Measure& m : outcome.measures) {
          switch (m.kind) {
            case MeasureKind::repeat_loop:
              if (m.context == FaultContext::cfi) {
                ++result.measures.repeat_cfi;
              } else {
                ++result.measures.repeat_ccc;
              }
              break;
            case MeasureKind::reload:
              ++result.measures.reload;
              break;
            case MeasureKind::relocate:
              ++result.measures.relocate;
              break;
          }
        }
        result.sim_time_ns += outcome.sim_time_ns;
        result.nominal_ns += outcome.nominal_ns;
        if (outcome.aborted) ++result.aborted_runs;
        fraction_sum += outcome.unmasked_read_fraction;
      }
    }
    result.blocks.push_back(stats);
  }

  result.totals.phase = "total";
  result.totals.name = "";
  for (const BlockStats& b : result.blocks) {
    result.totals.count_per_sample += b.count_per_sample;
    result.totals.runs += b.runs;
    result.totals.effective += b.effective;
    result.totals.detected += b.detected;
    result.totals.corrected += b.corrected;
    result.totals.false_positives += b.false_positives;
  }
  result.patcher = table.snapshot();
  result.avg_unmasked_read_fraction =
      result.totals.runs == 0
          ? 0.0
          : fraction_sum / static_cast<double>(result.totals.runs);
  return result;
}

namespace {

nlohmann::json stats_to_json(const BlockStats& b) {
  return nlohmann::json{
      {"phase", b.phase},
      {"name", b.name},
      {"count_per_sample", b.count_per_sample},
      {"runs", b.runs},
      {"effective", b.effective},
      {"detected", b.detected},
      {"corrected", b.corrected},
      {"false_positives", b.false_positives},
      {"detection_pct", detection_pct(b)},
      {"correction_pct", correction_pct(b)},
  };
}

BlockStats stats_from_json(const nlohmann::json& j) {
  BlockStats b;
  b.phase = j.at("phase").get<std::string>();
  b.name = j.at("name").get<std::string>();
  b.count_per_sample = j.at("count_per_sample").get<std::uint64_t>();
  b.runs = j.at("runs").get<std::uint64_t>();
  b.effective = j.at("effective").get<std::uint64_t>();
  b.detected = j.at("detected").get<std::uint64_t>();
  b.corrected = j.at("corrected").get<std::uint64_t>();
  b.false_positives = j.at("false_positives").get<std::uint64_t>();
  return b;
}

}  // namespace

std::string to_json(const CampaignResult& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = {
      {"variant", to_string(r.config.variant)},
      {"samples", r.config.samples},
      {"seed", r.config.seed},
      {"slots", r.config.slots},
      {"thresholds",
       {{"cfi_reload", r.config.thresholds.cfi_reload},
        {"cfi_relocate", r.config.thresholds.cfi_relocate},
        {"ccc_reload", r.config.thresholds.ccc_reload},
        {"ccc_relocate", r.config.thresholds.ccc_relocate}}},
      {"latencies",
       {{"repeat_ns", r.config.latencies.repeat_ns},
        {"reload_ns", r.config.latencies.reload_ns},
        {"relocate_ns", r.config.latencies.relocate_ns}}},
      {"weights",
       {{"flagged", r.config.w_flagged},
        {"uncorrected", r.config.w_uncorrected}}},
      {"stuck", to_string(r.config.stuck)},
      {"mask", to_string(r.config.mask)},
      {"monitors", r.config.monitors},
      {"max_attempts", r.config.max_attempts},
  };
  j["blocks"] = nlohmann::json::array();
  for (const BlockStats& b : r.blocks) j["blocks"].push_back(stats_to_json(b));
  j["totals"] = stats_to_json(r.totals);
  j["patcher"] = nlohmann::json::array();
  for (const SlotRecord& s : r.patcher) {
    j["patcher"].push_back({
        {"slot", s.id},
        {"runs", s.runs},
        {"flagged", s.flagged},
        {"uncorrected", s.uncorrected},
        {"cfi_faults", s.cfi_faults},
        {"ccc_faults", s.ccc_faults},
    });
  }
  j["measures"] = {
      {"repeat_cfi", r.measures.repeat_cfi},
      {"repeat_ccc", r.measures.repeat_ccc},
      {"reload", r.measures.reload},
      {"relocate", r.measures.relocate},
  };
  j["sim_time_ns"] = r.sim_time_ns;
  j["nominal_ns"] = r.nominal_ns;
  j["aborted_runs"] = r.aborted_runs;
  j["avg_unmasked_read_fraction"] = r.avg_unmasked_read_fraction;
  return j.dump(2) + "\n";
}

CampaignResult campaign_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("unsupported report schema version");
  }
  CampaignResult r;
  const nlohmann::json& c = j.at("config");
  r.config.variant = variant_from_string(c.at("variant").get<std::string>());
  r.config.samples = c.at("samples").get<std::size_t>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.config.slots = c.at("slots").get<std::size_t>();
  r.config.thresholds.cfi_reload =
      c.at("thresholds").at("cfi_reload").get<std::uint64_t>();
  r.config.thresholds.cfi_relocate =
      c.at("thresholds").at("cfi_relocate").get<std::uint64_t>();
  r.config.thresholds.ccc_reload =
      c.at("thresholds").at("ccc_reload").get<std::uint64_t>();
  r.config.thresholds.ccc_relocate =
      c.at("thresholds").at("ccc_relocate").get<std::uint64_t>();
  r.config.latencies.repeat_ns =
      c.at("latencies").at("repeat_ns").get<std::uint64_t>();
  r.config.latencies.reload_ns =
      c.at("latencies").at("reload_ns").get<std::uint64_t>();
  r.config.latencies.relocate_ns =
      c.at("latencies").at("relocate_ns").get<std::uint64_t>();
  r.config.w_flagged = c.at("weights").at("flagged").get<double>();
  r.config.w_uncorrected = c.at("weights").at("uncorrected").get<double>();
  r.config.stuck = stuck_from_string(c.at("stuck").get<std::string>());
  r.config.mask = mask_from_string(c.at("mask").get<std::string>());
  r.config.monitors = c.at("monitors").get<bool>();
  r.config.max_attempts = c.at("max_attempts").get<std::size_t>();

  for (const nlohmann::json& b : j.at("blocks")) {
    r.blocks.push_back(stats_from_json(b));
  }
  r.totals = stats_from_json(j.at("totals"));
  for (const nlohmann::json& s : j.at("patcher")) {
    SlotRecord rec;
    rec.id = s.at("slot").get<std::size_t>();
    rec.runs = s.at("runs").get<std::uint64_t>();
    rec.flagged = s.at("flagged").get<std::uint64_t>();
    rec.uncorrected = s.at("uncorrected").get<std::uint64_t>();
    rec.cfi_faults = s.at("cfi_faults").get<std::uint64_t>();
    rec.ccc_faults = s.at("ccc_faults").get<std::uint64_t>();
    r.patcher.push_back(rec);
  }
  r.measures.repeat_cfi = j.at("measures").at("repeat_cfi").get<std::uint64_t>();
  r.measures.repeat_ccc = j.at("measures").at("repeat_ccc").get<std::uint64_t>();
  r.measures.reload = j.at("measures").at("reload").get<std::uint64_t>();
  r.measures.relocate = j.at("measures").at("relocate").get<std::uint64_t>();
  r.sim_time_ns = j.at("sim_time_ns").get<std::uint64_t>();
  r.nominal_ns = j.at("nominal_ns").get<std::uint64_t>();
  r.aborted_runs = j.at("aborted_runs").get<std::uint64_t>();
  r.avg_unmasked_read_fraction =
      j.at("avg_unmasked_read_fraction").get<double>();
  return r;
}

std::string render_table(const CampaignResult& r) {
  std::ostringstream os;
  os << "fault-injection campaign, variant " << to_string(r.config.variant)
     << ", " << r.config.samples << " samples, seed " << r.config.seed << "\n";
  os << std::left << std::setw(22) << "block" << std::right << std::setw(8)
     << "runs" << std::setw(11) << "effective" << std::setw(10) << "detected"
     << std::setw(11) << "corrected" << std::setw(8) << "det%" << std::setw(9)
     << "corr%" << "\n";
  const auto line = [&os](const BlockStats& b, const std::string& label) {
    os << std::left << std::setw(22) << label << std::right << std::setw(8)
       << b.runs << std::setw(11) << b.effective << std::setw(10) << b.detected
       << std::setw(11) << b.corrected << std::setw(8) << std::fixed
       << std::setprecision(1) << detection_pct(b) << std::setw(9)
       << correction_pct(b) << "\n";
  };
  for (const BlockStats& b : r.blocks) line(b, b.phase + "/" + b.name);
  line(r.totals, "total");
  os << "false positives: " << r.totals.false_positives
     << ", aborted runs: " << r.aborted_runs << "\n";
  os << "measures: repeat(cfi)=" << r.measures.repeat_cfi
     << " repeat(ccc)=" << r.measures.repeat_ccc
     << " reload=" << r.measures.reload << " relocate=" << r.measures.relocate
     << "\n";
  os << "sim time: " << r.sim_time_ns << " ns (nominal " << r.nominal_ns
     << " ns)\n";
  os << "avg unmasked read fraction: " << std::setprecision(4)
     << r.avg_unmasked_read_fraction << "\n";
  return os.str();
}

}  // namespace sntt
