#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sntt/signals.hpp"

// Stuck-at control-signal fault injector. A plan is the pair (r_t, r_s): the
// trigger cycle and the pattern seed whose 10-bit msb-first binary expansion
// selects which roster signals the gate attacks (a 0 bit marks an attacked
// signal in both polarities).
namespace sntt {

enum class StuckAt { zero, one };

enum class Persistence {
  single_cycle,          // gate active for exactly one cycle
  permanent_from_cycle,  // gate latched from r_t until cleared (reload/relocate)
};

struct FaultPlan {
  std::uint32_t r_t = 0;  // 0-based raw-cycle index after activation, <= 1023
  std::uint32_t r_s = 0;  // pattern seed, <= 1023
  StuckAt mode = StuckAt::zero;
  Persistence persistence = Persistence::single_cycle;
  std::size_t slot_scope = 0;  // PR slot the plan is bound to

  void validate() const;  // throws std::out_of_range if a field exceeds 10 bits
};

// f_r[b] is bit (9-b) of r_s, i.e. the msb-first binary expansion; b indexes
// the signal roster. r_s = 766 -> 1011111110. Throws std::out_of_range for
// r_s > 1023.
std::array<bool, kNumSignals> encode_pattern(std::uint32_t r_s);

// Stuck-at-0: s_b AND f_r[b].  Stuck-at-1: s_b OR NOT f_r[b].
// Inactive gates pass the vector through untouched.
ControlSignalVector gate(const ControlSignalVector& sig,
                         const std::array<bool, kNumSignals>& f_r, StuckAt mode,
                         bool active);

// A plan is effective when gating the fault-free signal vector of its trigger
// cycle changes at least one signal. golden_stream[i] is the fault-free
// observed vector at raw cycle i+1.
bool is_effective(const FaultPlan& plan,
                  const std::vector<ControlSignalVector>& golden_stream);

// Convenience: the pattern seed whose expansion attacks exactly one signal.
std::uint32_t pattern_for_single_signal(SignalId s);

}  // namespace sntt
