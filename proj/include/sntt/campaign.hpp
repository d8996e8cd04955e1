#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sntt/correction.hpp"
#include "sntt/run.hpp"

// Fault-injection campaign over the transform workload of a lattice KEM:
// every protected polynomial transform of each protocol phase is run with one
// randomly drawn stuck-at plan, and detection/correction effectiveness is
// tabulated per block.
namespace sntt {

enum class Variant { v512, v768, v1024 };
enum class StuckPolicy { zero, one, both };

const char* to_string(Variant v);
const char* to_string(StuckPolicy s);
const char* to_string(MaskMode m);
Variant variant_from_string(const std::string& s);
StuckPolicy stuck_from_string(const std::string& s);
MaskMode mask_from_string(const std::string& s);

// Module rank of the KEM variant (2, 3 or 4): the number of polynomials per
// vector, which is what scales the per-phase transform counts.
unsigned module_rank(Variant v);

// One row of the effectiveness table: a named transform inside a protocol
// phase and how many times one protocol execution runs it. Rank-dependent
// rows hold count k; the rest are fixed.
struct BlockRow {
  std::string phase;
  std::string name;
  std::uint64_t count = 0;
};

// The 11 workload rows. Per protocol execution the totals are 2k (key
// generation), 2k+1 (encapsulation) and 3k+2 (decapsulation): 17 / 24 / 31
// transforms for rank 2 / 3 / 4.
std::vector<BlockRow> kem_blocks(Variant v);

struct CampaignConfig {
  Variant variant = Variant::v512;
  std::size_t samples = 64;  // protocol executions per block row
  std::uint64_t seed = 1;
  std::size_t slots = 4;  // reconfigurable slots on the floor
  Thresholds thresholds{};
  MeasureLatencies latencies{};
  double w_flagged = 0.5;  // risk weights for slot placement
  double w_uncorrected = 0.5;
  StuckPolicy stuck = StuckPolicy::both;
  MaskMode mask = MaskMode::per_write;
  bool monitors = true;
  std::size_t max_attempts = 16;

  void validate() const;  // throws std::invalid_argument
};

struct BlockStats {
  std::string phase;
  std::string name;
  std::uint64_t count_per_sample = 0;
  std::uint64_t runs = 0;
  std::uint64_t effective = 0;  // injected plans that perturb the golden cycle
  std::uint64_t detected = 0;   // effective runs with a monitor flag
  std::uint64_t corrected = 0;  // effective runs with a correct final output
  std::uint64_t false_positives = 0;  // ineffective runs that still flagged
};

// Percentage helpers; an empty denominator reports 100.0 (nothing to catch).
double detection_pct(const BlockStats& b);
double correction_pct(const BlockStats& b);

struct MeasureTally {
  std::uint64_t repeat_cfi = 0;
  std::uint64_t repeat_ccc = 0;
  std::uint64_t reload = 0;
  std::uint64_t relocate = 0;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<BlockStats> blocks;
  BlockStats totals;  // phase "total"
  std::vector<SlotRecord> patcher;
  MeasureTally measures;
  std::uint64_t sim_time_ns = 0;
  std::uint64_t nominal_ns = 0;
  std::uint64_t aborted_runs = 0;
  double avg_unmasked_read_fraction = 0.0;
};

// Serial, fully deterministic in the seed: per-run RNG streams are derived by
// a splitmix hash of (seed, run index) and all range reduction is by modulo.
CampaignResult run_campaign(const CampaignConfig& cfg);

// JSON serialization (stable key order; byte-identical for identical
// results) and the fixed-width effectiveness table.
std::string to_json(const CampaignResult& r);
CampaignResult campaign_from_json(const std::string& text);
std::string render_table(const CampaignResult& r);

}  // namespace sntt
