#include "sntt/correction.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sntt {

const char* to_string(FaultContext c) {
  return c == FaultContext::cfi ? "cfi" : "ccc";
}

const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::repeat_loop:
      return "repeat";
    case MeasureKind::reload:
      return "reload";
    case MeasureKind::relocate:
      return "relocate";
  }
  return "?";
}

void Thresholds::validate() const {
  if (cfi_reload >= cfi_relocate || ccc_reload >= ccc_relocate) {
    throw std::invalid_argument(
        "thresholds: reload threshold must be below relocate threshold");
  }
}

MeasureKind choose_measure(std::uint64_t count, std::uint64_t reload_threshold,
                           std::uint64_t relocate_threshold) {
  if (count > reload_threshold && count < relocate_threshold) {
    return MeasureKind::reload;
  }
  if (count > relocate_threshold) {
    return MeasureKind::relocate;
  }
  return MeasureKind::repeat_loop;
}

double risk_general(const std::vector<double>& terms,
                    const std::vector<double>& maxima,
                    const std::vector<double>& weights) {
  if (terms.size() != maxima.size() || terms.size() != weights.size()) {
    throw std::invalid_argument("risk: mismatched term/maxima/weight sizes");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("risk: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("risk: all-zero weights");
  double r = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] < 0.0 || maxima[i] < 0.0) {
      throw std::invalid_argument("risk: negative term or maximum");
    }
    if (maxima[i] > 0.0) {
      r += (weights[i] / wsum) * (terms[i] / maxima[i]);
    }
  }
  return r;
}

std::vector<double> risk_scores(const std::vector<SlotRecord>& records,
                                double w_flagged, double w_uncorrected) {
  std::vector<double> flag_ratio(records.size(), 0.0);
  std::vector<double> unc_ratio(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].runs > 0) {
      const double runs = static_cast<double>(records[i].runs);
      flag_ratio[i] = static_cast<double>(records[i].flagged) / runs;
      unc_ratio[i] = static_cast<double>(records[i].uncorrected) / runs;
    }
  }
  const double max_flag = *std::max_element(flag_ratio.begin(), flag_ratio.end());
  const double max_unc = *std::max_element(unc_ratio.begin(), unc_ratio.end());
  std::vector<double> out(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i] = risk_general({flag_ratio[i], unc_ratio[i]}, {max_flag, max_unc},
                          {w_flagged, w_uncorrected});
  }
  return out;
}

PatcherTable::PatcherTable(std::size_t slots, double w_flagged,
                           double w_uncorrected)
    : w_flagged_(w_flagged), w_uncorrected_(w_uncorrected) {
  if (slots == 0) throw std::invalid_argument("patcher table needs >= 1 slot");
  if (w_flagged < 0.0 || w_uncorrected < 0.0 ||
      w_flagged + w_uncorrected <= 0.0) {
    throw std::invalid_argument("patcher table: invalid risk weights");
  }
  records_.resize(slots);
  for (std::size_t i = 0; i < slots; ++i) records_[i].id = i;
}

std::size_t PatcherTable::slots() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

void PatcherTable::record_run(std::size_t slot) {
  std::lock_guard<std::mutex> lock(mu_);
  ++records_.at(slot).runs;
}

void PatcherTable::record_flagged(std::size_t slot) {
  std::lock_guard<std::mutex> lock(mu_);
  ++records_.at(slot).flagged;
}

void PatcherTable::record_uncorrected(std::size_t slot) {
  std::lock_guard<std::mutex> lock(mu_);
  ++records_.at(slot).uncorrected;
}

std::uint64_t PatcherTable::bump_fault(std::size_t slot, FaultContext ctx) {
  std::lock_guard<std::mutex> lock(mu_);
  SlotRecord& r = records_.at(slot);
  return ctx == FaultContext::cfi ? ++r.cfi_faults : ++r.ccc_faults;
}

std::uint64_t PatcherTable::fault_count(std::size_t slot,
                                        FaultContext ctx) const {
  std::lock_guard<std::mutex> lock(mu_);
  const SlotRecord& r = records_.at(slot);
  return ctx == FaultContext::cfi ? r.cfi_faults : r.ccc_faults;
}

std::vector<SlotRecord> PatcherTable::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

std::optional<std::size_t> PatcherTable::select_slot(
    std::optional<std::size_t> exclude) const {
  std::vector<SlotRecord> recs = snapshot();
  const std::vector<double> risks = risk_scores(recs, w_flagged_, w_uncorrected_);

  std::optional<std::size_t> best;
  auto better = [&](std::size_t a, std::size_t b) {
    // Slots without history rank after every slot with history.
    const bool fresh_a = recs[a].runs == 0;
    const bool fresh_b = recs[b].runs == 0;
    if (fresh_a != fresh_b) return !fresh_a;
    if (risks[a] != risks[b]) return risks[a] < risks[b];
    if (recs[a].runs != recs[b].runs) return recs[a].runs > recs[b].runs;
    return a < b;
  };
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (exclude && *exclude == i) continue;
    if (!best || better(i, *best)) best = i;
  }
  return best;
}

Corrector::Corrector(PatcherTable* table, Thresholds th, MeasureLatencies lat)
    : table_(table), thresholds_(th), latencies_(lat) {
  if (table_ == nullptr) {
    throw std::invalid_argument("corrector needs a placement table");
  }
  thresholds_.validate();
}

Measure Corrector::on_fault(FaultContext ctx, std::size_t slot,
                            std::uint64_t raw_cycle,
                            std::uint64_t full_run_ns) {
  const std::uint64_t count = table_->bump_fault(slot, ctx);
  const std::uint64_t reld =
      ctx == FaultContext::cfi ? thresholds_.cfi_reload : thresholds_.ccc_reload;
  const std::uint64_t relc = ctx == FaultContext::cfi
                                 ? thresholds_.cfi_relocate
                                 : thresholds_.ccc_relocate;
  MeasureKind kind = choose_measure(count, reld, relc);
  if (strategy_) kind = strategy_(ctx, count, kind);

  Measure m;
  m.context = ctx;
  m.kind = kind;
  m.slot = slot;
  m.raw_cycle = raw_cycle;
  m.fault_count = count;
  switch (kind) {
    case MeasureKind::repeat_loop:
      // A mid-run repeat is a checkpoint replay bubble; an end-of-run repeat
      // is a whole-transform re-run.
      m.cost_ns = ctx == FaultContext::cfi ? latencies_.repeat_ns : full_run_ns;
      break;
    case MeasureKind::reload:
      m.cost_ns = latencies_.reload_ns;
      break;
    case MeasureKind::relocate:
      m.cost_ns = latencies_.relocate_ns;
      break;
  }
  return m;
}

void checked_rollback(Pipeline& pipe, MonitorSet& monitors,
                      std::uint64_t raw_cycle) {
  if (!monitors.enabled() || !monitors.flags().any()) {
    throw std::logic_error(
        "rollback without a raised monitor flag is not permitted");
  }
  pipe.rollback();
  monitors.on_rollback(pipe.retire_cursor(), raw_cycle);
}

}  // namespace sntt
