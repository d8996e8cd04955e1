// Command-line front end for the protected-transform simulator: single
// transforms, single fault injections, full campaigns and report rendering.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sntt/campaign.hpp"
#include "sntt/correction.hpp"
#include "sntt/injector.hpp"
#include "sntt/ntt_core.hpp"
#include "sntt/run.hpp"

namespace {

sntt::Polynomial random_polynomial(std::size_t n, sntt::Residue q,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  sntt::Polynomial p(n);
  for (sntt::Residue& c : p) c = static_cast<sntt::Residue>(rng() % q);
  return p;
}

sntt::Polynomial load_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.is_array()) {
    throw std::invalid_argument("input file must hold a JSON array");
  }
  sntt::Polynomial p;
  for (const nlohmann::json& v : j) {
    p.push_back(v.get<sntt::Residue>());
  }
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
}

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open report file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json flags_to_json(const sntt::FaultFlags& f) {
  return nlohmann::json{
      {"barrett_cfi", f.barrett_cfi},   {"polymem_cfi", f.polymem_cfi},
      {"uv_cfi", f.uv_cfi},             {"cfi_fault", f.cfi_fault},
      {"ccc_fault", f.ccc_fault},       {"first_cfi_cycle", f.first_cfi_cycle},
      {"first_ccc_cycle", f.first_ccc_cycle},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-accurate simulator of a fault-monitored pipelined "
               "number-theoretic transform engine"};
  app.require_subcommand(1);

  // ---- campaign ----
  auto* cmd_campaign = app.add_subcommand(
      "campaign", "run a stuck-at fault-injection campaign over the KEM workload");
  std::string variant = "512";
  std::size_t samples = 64;
  std::uint64_t seed = 1;
  std::size_t slots = 4;
  std::vector<std::uint64_t> thresholds;
  std::vector<double> weights;
  std::string stuck = "both";
  std::string mask = "per-write";
  bool no_monitors = false;
  std::size_t max_attempts = 16;
  std::string out_path;
  std::string format = "table";
  std::string config_path;
  cmd_campaign->add_option("--variant", variant,
                           "KEM variant: 512, 768 or 1024");
  cmd_campaign->add_option("--samples", samples,
                           "protocol executions per block row");
  cmd_campaign->add_option("--seed", seed, "campaign master seed");
  cmd_campaign->add_option("--slots", slots, "reconfigurable slots");
  cmd_campaign
      ->add_option("--thresholds", thresholds,
                   "cfi-reload cfi-relocate ccc-reload ccc-relocate")
      ->expected(4);
  cmd_campaign
      ->add_option("--weights", weights, "risk weights: flagged uncorrected")
      ->expected(2);
  cmd_campaign->add_option("--stuck", stuck, "stuck-at polarity: 0, 1 or both");
  cmd_campaign->add_option("--mask", mask,
                           "write masking: per-write, per-run or off");
  cmd_campaign->add_flag("--no-monitors", no_monitors,
                         "disable the runtime monitors");
  cmd_campaign->add_option("--max-attempts", max_attempts,
                           "re-run budget per transform");
  cmd_campaign->add_option("--out", out_path, "write the report to this file");
  cmd_campaign->add_option("--format", format, "report format: table or json");
  cmd_campaign->add_option("--config", config_path,
                           "JSON config file (flags override its fields)");

  // ---- ntt ----
  auto* cmd_ntt = app.add_subcommand(
      "ntt", "compute one transform (behavioral or pipelined engine)");
  std::size_t ntt_n = 256;
  std::uint32_t ntt_q = 3329;
  std::string ntt_input;
  std::uint64_t ntt_seed = 1;
  bool ntt_inverse = false;
  std::string engine = "behavioral";
  bool natural = false;
  cmd_ntt->add_option("--n", ntt_n, "transform length (power of two)");
  cmd_ntt->add_option("--q", ntt_q, "modulus (odd prime below 4096)");
  cmd_ntt->add_option("--input", ntt_input,
                      "JSON array file; omitted = random from --seed");
  cmd_ntt->add_option("--seed", ntt_seed, "seed for a random input");
  cmd_ntt->add_flag("--inverse", ntt_inverse,
                    "inverse transform (behavioral engine only)");
  cmd_ntt->add_option("--engine", engine, "behavioral or pipeline");
  cmd_ntt->add_flag("--natural", natural,
                    "emit the forward output in evaluation order");

  // ---- inject ----
  auto* cmd_inject = app.add_subcommand(
      "inject", "run one transform with one stuck-at fault plan");
  std::uint32_t rt = 0;
  std::uint32_t rs = 0;
  std::string inj_stuck = "0";
  bool permanent = false;
  bool floor_profile = false;
  std::size_t inj_slot = 0;
  std::size_t inj_slots = 4;
  std::uint64_t inj_seed = 1;
  std::string inj_mask = "per-write";
  bool inj_no_monitors = false;
  bool no_corrector = false;
  bool strict = false;
  std::size_t inj_n = 256;
  std::uint32_t inj_q = 3329;
  std::size_t inj_attempts = 16;
  cmd_inject->add_option("--rt", rt, "trigger cycle, 0-based")->required();
  cmd_inject->add_option("--rs", rs, "pattern seed, 10-bit")->required();
  cmd_inject->add_option("--stuck", inj_stuck, "polarity: 0 or 1");
  cmd_inject->add_flag("--permanent", permanent,
                       "gate stays active from the trigger cycle on");
  cmd_inject->add_flag("--profile", floor_profile,
                       "floor-level fault: survives slot reloads");
  cmd_inject->add_option("--slot", inj_slot, "slot the plan is bound to");
  cmd_inject->add_option("--slots", inj_slots, "slots available on the floor");
  cmd_inject->add_option("--seed", inj_seed, "input/mask seed");
  cmd_inject->add_option("--mask", inj_mask,
                         "write masking: per-write, per-run or off");
  cmd_inject->add_flag("--no-monitors", inj_no_monitors,
                       "disable the runtime monitors");
  cmd_inject->add_flag("--no-corrector", no_corrector,
                       "detect only, never repair");
  cmd_inject->add_flag("--strict", strict,
                       "end-of-run check compares whole signal streams");
  cmd_inject->add_option("--n", inj_n, "transform length");
  cmd_inject->add_option("--q", inj_q, "modulus");
  cmd_inject->add_option("--max-attempts", inj_attempts, "re-run budget");

  // ---- report ----
  auto* cmd_report =
      app.add_subcommand("report", "render a campaign report JSON as a table");
  std::string in_path;
  cmd_report->add_option("--in", in_path, "report file ('-' for stdin)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_campaign->parsed()) {
      sntt::CampaignConfig cfg;
      if (!config_path.empty()) {
        const nlohmann::json j = nlohmann::json::parse(read_all(config_path));
        if (j.contains("variant")) {
          cfg.variant =
              sntt::variant_from_string(j.at("variant").get<std::string>());
        }
        if (j.contains("samples")) cfg.samples = j.at("samples").get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("slots")) cfg.slots = j.at("slots").get<std::size_t>();
        if (j.contains("stuck")) {
          cfg.stuck = sntt::stuck_from_string(j.at("stuck").get<std::string>());
        }
        if (j.contains("mask")) {
          cfg.mask = sntt::mask_from_string(j.at("mask").get<std::string>());
        }
        if (j.contains("monitors")) cfg.monitors = j.at("monitors").get<bool>();
        if (j.contains("max_attempts")) {
          cfg.max_attempts = j.at("max_attempts").get<std::size_t>();
        }
        if (j.contains("thresholds")) {
          const nlohmann::json& t = j.at("thresholds");
          cfg.thresholds.cfi_reload = t.at("cfi_reload").get<std::uint64_t>();
          cfg.thresholds.cfi_relocate = t.at("cfi_relocate").get<std::uint64_t>();
          cfg.thresholds.ccc_reload = t.at("ccc_reload").get<std::uint64_t>();
          cfg.thresholds.ccc_relocate = t.at("ccc_relocate").get<std::uint64_t>();
        }
        if (j.contains("weights")) {
          cfg.w_flagged = j.at("weights").at("flagged").get<double>();
          cfg.w_uncorrected = j.at("weights").at("uncorrected").get<double>();
        }
      }
      if (cmd_campaign->count("--variant")) {
        cfg.variant = sntt::variant_from_string(variant);
      }
      if (cmd_campaign->count("--samples")) cfg.samples = samples;
      if (cmd_campaign->count("--seed")) cfg.seed = seed;
      if (cmd_campaign->count("--slots")) cfg.slots = slots;
      if (cmd_campaign->count("--stuck")) {
        cfg.stuck = sntt::stuck_from_string(stuck);
      }
      if (cmd_campaign->count("--mask")) cfg.mask = sntt::mask_from_string(mask);
      if (no_monitors) cfg.monitors = false;
      if (cmd_campaign->count("--max-attempts")) cfg.max_attempts = max_attempts;
      if (!thresholds.empty()) {
        cfg.thresholds.cfi_reload = thresholds[0];
        cfg.thresholds.cfi_relocate = thresholds[1];
        cfg.thresholds.ccc_reload = thresholds[2];
        cfg.thresholds.ccc_relocate = thresholds[3];
      }
      if (!weights.empty()) {
        cfg.w_flagged = weights[0];
        cfg.w_uncorrected = weights[1];
      }

      const sntt::CampaignResult result = sntt::run_campaign(cfg);
      if (format == "json") {
        emit(sntt::to_json(result), out_path);
      } else if (format == "table") {
        emit(sntt::render_table(result), out_path);
      } else {
        throw std::invalid_argument("unknown format: " + format);
      }
      const bool ok = result.totals.corrected == result.totals.effective &&
                      result.aborted_runs == 0;
      return ok ? 0 : 1;
    }

    if (cmd_ntt->parsed()) {
      const sntt::NttParams p = sntt::NttParams::make(ntt_n, ntt_q);
      sntt::Polynomial input = ntt_input.empty()
                                   ? random_polynomial(p.n, p.q, ntt_seed)
                                   : load_polynomial(ntt_input);
      sntt::validate_polynomial(input, p);

      sntt::Polynomial output;
      std::string order;
      if (ntt_inverse) {
        if (engine != "behavioral") {
          throw std::invalid_argument(
              "the pipelined engine computes the forward transform only");
        }
        output = sntt::intt_behavioral(input, p);
        order = "natural";
      } else if (engine == "behavioral") {
        output = sntt::ntt_behavioral(input, p);
        order = "engine";
      } else if (engine == "pipeline") {
        sntt::RunConfig rc;
        rc.mask_mode = sntt::MaskMode::per_write;
        rc.seed = ntt_seed;
        const sntt::RunOutcome o =
            sntt::run_transform(p, input, {}, rc, nullptr);
        output = o.output_raw;
        order = "engine";
      } else {
        throw std::invalid_argument("unknown engine: " + engine);
      }
      if (natural && !ntt_inverse) {
        output = sntt::to_natural_order(output);
        order = "natural";
      }
      nlohmann::json j{{"n", p.n},       {"q", p.q},   {"omega", p.omega},
                       {"order", order}, {"input", input}, {"output", output}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (cmd_inject->parsed()) {
      const sntt::NttParams p = sntt::NttParams::make(inj_n, inj_q);
      const sntt::Polynomial input = random_polynomial(p.n, p.q, inj_seed);

      sntt::FaultPlan plan;
      plan.r_t = rt;
      plan.r_s = rs;
      plan.mode = inj_stuck == "1" ? sntt::StuckAt::one : sntt::StuckAt::zero;
      if (inj_stuck != "0" && inj_stuck != "1") {
        throw std::invalid_argument("stuck polarity must be 0 or 1");
      }
      plan.persistence = permanent ? sntt::Persistence::permanent_from_cycle
                                   : sntt::Persistence::single_cycle;
      plan.slot_scope = inj_slot;
      plan.validate();

      const sntt::GoldenSegment golden = sntt::golden_segment(p.n, 0);
      const bool effective =
          plan.r_t < golden.stream.size() &&
          sntt::is_effective(plan, golden.stream);

      sntt::PatcherTable table(inj_slots);
      sntt::Corrector corrector(&table);
      sntt::RunConfig rc;
      rc.mask_mode = sntt::mask_from_string(inj_mask);
      rc.monitors_enabled = !inj_no_monitors;
      rc.strict_stream = strict;
      rc.seed = inj_seed;
      rc.slot = inj_slot;
      rc.max_attempts = inj_attempts;

      const sntt::RunOutcome o =
          sntt::run_transform(p, input, {sntt::FaultSpec{plan, floor_profile}},
                              rc, no_corrector ? nullptr : &corrector);
      const sntt::Polynomial reference = sntt::ntt_behavioral(input, p);
      const bool corrected = o.completed && o.output_raw == reference;

      nlohmann::json measures = nlohmann::json::array();
      for (const sntt::Measure& m : o.measures) {
        measures.push_back({{"context", sntt::to_string(m.context)},
                            {"kind", sntt::to_string(m.kind)},
                            {"slot", m.slot},
                            {"raw_cycle", m.raw_cycle},
                            {"fault_count", m.fault_count},
                            {"cost_ns", m.cost_ns}});
      }
      const nlohmann::json j{
          {"effective", effective},
          {"detected", o.detected},
          {"corrected", corrected},
          {"completed", o.completed},
          {"aborted", o.aborted},
          {"attempts", o.attempts},
          {"final_slot", o.final_slot},
          {"flags", flags_to_json(o.flags)},
          {"measures", measures},
          {"raw_cycles", o.raw_cycles},
          {"active_cycles", o.active_cycles},
          {"stall_cycles", o.stall_cycles},
          {"nominal_ns", o.nominal_ns},
          {"sim_time_ns", o.sim_time_ns},
          {"unmasked_read_fraction", o.unmasked_read_fraction},
      };
      std::cout << j.dump(2) << "\n";
      return (!effective || corrected) ? 0 : 1;
    }

    if (cmd_report->parsed()) {
      const sntt::CampaignResult r =
          sntt::campaign_from_json(read_all(in_path));
      std::cout << sntt::render_table(r);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
