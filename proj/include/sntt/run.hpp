#pragma once

#include <cstdint>
#include <vector>

#include "sntt/correction.hpp"
#include "sntt/injector.hpp"
#include "sntt/masking.hpp"
#include "sntt/monitors.hpp"
#include "sntt/ntt_core.hpp"
#include "sntt/pipeline.hpp"

// One protected transform execution: the pipelined engine under an optional
// set of fault plans, watched by the monitors, repaired by the corrector.
namespace sntt {

// A plan plus its binding. A floor-level profile survives a slot reload and
// can only be escaped by relocating to a different slot; an ordinary plan
// models injected configuration and is scrubbed by a reload. Single-cycle
// plans fire at most once per run, across every attempt.
struct FaultSpec {
  FaultPlan plan;
  bool floor_profile = false;
};

struct RunConfig {
  MaskMode mask_mode = MaskMode::per_write;
  bool monitors_enabled = true;
  bool strict_stream = false;
  std::uint64_t seed = 0;  // mask-draw stream seed
  bool keep_trace = false;
  std::size_t slot = 0;  // reconfigurable slot the run starts on
  std::size_t max_attempts = 16;
  // Debug: raw cycles at which the Barrett unit internally hangs for one
  // cycle (its registers and status delay line hold instead of advancing).
  std::vector<std::uint64_t> barrett_stall_cycles;
};

struct RunOutcome {
  Polynomial output_raw;      // transform output, engine (bit-reversed) order
  Polynomial output_natural;  // evaluation order

  bool completed = false;            // final attempt drained (no watchdog)
  bool aborted = false;              // some attempt hit the watchdog
  bool detected = false;             // any flag or abort across attempts
  bool final_segment_clean = false;  // last attempt ended with clean tallies
  FaultFlags flags;                  // monitor flags of the final attempt

  std::uint64_t attempts = 0;
  std::size_t final_slot = 0;

  std::uint64_t raw_cycles_total = 0;  // stepped cycles across attempts
  std::uint64_t raw_cycles = 0;        // final attempt
  std::uint64_t active_cycles = 0;
  std::uint64_t stall_cycles = 0;

  std::uint64_t nominal_ns = 0;   // fault-free schedule duration
  std::uint64_t sim_time_ns = 0;  // nominal plus every measure cost

  std::vector<Measure> measures;

  std::uint64_t total_reads = 0;  // final attempt read-port traffic
  std::uint64_t unmasked_reads = 0;
  double unmasked_read_fraction = 0.0;

  std::vector<CycleRecord> trace;  // final attempt, when requested
};

// Watchdog budget per attempt, in multiples of the fault-free schedule.
inline constexpr std::uint64_t kWatchdogFactor = 64;

RunOutcome run_transform(const NttParams& params, const Polynomial& input,
                         const std::vector<FaultSpec>& faults,
                         const RunConfig& cfg, Corrector* corrector);

}  // namespace sntt
