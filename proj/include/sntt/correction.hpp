#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "sntt/monitors.hpp"
#include "sntt/pipeline.hpp"

// Fault response: escalating countermeasures (checkpoint repeat, slot reload,
// slot relocation) chosen from per-slot cumulative fault counts, plus the
// risk-ranked placement table shared by every run of a campaign.
namespace sntt {

enum class FaultContext { cfi, ccc };
enum class MeasureKind { repeat_loop, reload, relocate };

const char* to_string(FaultContext c);
const char* to_string(MeasureKind k);

struct Thresholds {
  // A fault count at or below the first threshold repeats from the last
  // checkpoint; strictly between them reloads the slot; strictly above the
  // second relocates to a spare slot.
  std::uint64_t cfi_reload = 256;
  std::uint64_t cfi_relocate = 512;
  std::uint64_t ccc_reload = 256;
  std::uint64_t ccc_relocate = 512;

  void validate() const;  // throws std::invalid_argument unless reload < relocate
};

MeasureKind choose_measure(std::uint64_t count, std::uint64_t reload_threshold,
                           std::uint64_t relocate_threshold);

struct MeasureLatencies {
  std::uint64_t repeat_ns = 10;        // checkpoint replay bubble
  std::uint64_t reload_ns = 150000;    // partial bitstream scrub
  std::uint64_t relocate_ns = 256000;  // module move to a spare slot
};

struct Measure {
  FaultContext context = FaultContext::cfi;
  MeasureKind kind = MeasureKind::repeat_loop;
  std::size_t slot = 0;
  std::uint64_t raw_cycle = 0;
  std::uint64_t fault_count = 0;  // cumulative per-slot count after the event
  std::uint64_t cost_ns = 0;
};

struct SlotRecord {
  std::size_t id = 0;
  std::uint64_t runs = 0;         // transforms executed on the slot
  std::uint64_t flagged = 0;      // runs with at least one monitor flag
  std::uint64_t uncorrected = 0;  // runs whose recovery failed
  std::uint64_t cfi_faults = 0;   // cumulative mid-run fault events
  std::uint64_t ccc_faults = 0;   // cumulative end-of-run fault events
};

// Weighted sum of per-slot metrics, each normalized by the metric's maximum
// over all slots; a metric whose maximum is zero contributes nothing. Weights
// are normalized internally. Throws std::invalid_argument on size mismatch,
// negative entries or an all-zero weight vector.
double risk_general(const std::vector<double>& terms,
                    const std::vector<double>& maxima,
                    const std::vector<double>& weights);

// Two-term instance used for placement: flagged-per-run and
// uncorrected-per-run, equal weights by default.
std::vector<double> risk_scores(const std::vector<SlotRecord>& records,
                                double w_flagged = 0.5,
                                double w_uncorrected = 0.5);

// Shared placement table. Thread-safe; campaign workers and correctors hit it
// concurrently. The risk weights are fixed at construction and used by every
// slot selection.
class PatcherTable {
 public:
  explicit PatcherTable(std::size_t slots, double w_flagged = 0.5,
                        double w_uncorrected = 0.5);

  std::size_t slots() const;
  void record_run(std::size_t slot);
  void record_flagged(std::size_t slot);
  void record_uncorrected(std::size_t slot);
  // Returns the new cumulative count for (slot, context).
  std::uint64_t bump_fault(std::size_t slot, FaultContext ctx);
  std::uint64_t fault_count(std::size_t slot, FaultContext ctx) const;

  std::vector<SlotRecord> snapshot() const;

  // Lowest-risk slot. Unused slots (zero runs) rank after any slot with
  // history; ties prefer the larger run count, then the lower id. Returns
  // nullopt only when every slot is excluded.
  std::optional<std::size_t> select_slot(
      std::optional<std::size_t> exclude = std::nullopt) const;

 private:
  mutable std::mutex mu_;
  std::vector<SlotRecord> records_;
  double w_flagged_;
  double w_uncorrected_;
};

// Picks the countermeasure for one fault event: bumps the per-slot count,
// applies the threshold ladder (or a scripted strategy override) and prices
// the measure. A checkpoint repeat in the end-of-run context means a full
// transform re-run, so its cost is the caller-supplied nominal run time.
class Corrector {
 public:
  using Strategy =
      std::function<MeasureKind(FaultContext, std::uint64_t count, MeasureKind proposed)>;

  Corrector(PatcherTable* table, Thresholds th = {}, MeasureLatencies lat = {});

  void set_strategy(Strategy s) { strategy_ = std::move(s); }

  Measure on_fault(FaultContext ctx, std::size_t slot, std::uint64_t raw_cycle,
                   std::uint64_t full_run_ns);

  PatcherTable* table() const { return table_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const MeasureLatencies& latencies() const { return latencies_; }

 private:
  PatcherTable* table_;
  Thresholds thresholds_;
  MeasureLatencies latencies_;
  Strategy strategy_;
};

// Checkpoint recovery is only legal once a monitor has demanded it; calling
// it on a clean engine is a programming error and throws std::logic_error.
void checked_rollback(Pipeline& pipe, MonitorSet& monitors,
                      std::uint64_t raw_cycle);

}  // namespace sntt
