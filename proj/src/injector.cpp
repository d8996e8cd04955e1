#include "sntt/injector.hpp"

#include <stdexcept>

namespace sntt {

void FaultPlan::validate() const {
  if (r_t > 1023) throw std::out_of_range("FaultPlan: r_t exceeds 10 bits");
  if (r_s > 1023) throw std::out_of_range("FaultPlan: r_s exceeds 10 bits");
}

std::array<bool, kNumSignals> encode_pattern(std::uint32_t r_s) {
  if (r_s > 1023) throw std::out_of_range("encode_pattern: seed exceeds 10 bits");
  std::array<bool, kNumSignals> f{};
  for (std::size_t b = 0; b < kNumSignals; ++b) {
    f[b] = ((r_s >> (kNumSignals - 1 - b)) & 1u) != 0;
  }
  return f;
}

ControlSignalVector gate(const ControlSignalVector& sig,
                         const std::array<bool, kNumSignals>& f_r, StuckAt mode,
                         bool active) {
  if (!active) return sig;
  ControlSignalVector out = sig;
  for (std::size_t b = 0; b < kNumSignals; ++b) {
    if (mode == StuckAt::zero) {
      out.bits[b] = out.bits[b] && f_r[b];
    } else {
      out.bits[b] = out.bits[b] || !f_r[b];
    }
  }
  return out;
}

bool is_effective(const FaultPlan& plan,
                  const std::vector<ControlSignalVector>& golden_stream) {
  plan.validate();
  if (plan.r_t >= golden_stream.size()) return false;  // beyond the run
  const ControlSignalVector& clean = golden_stream[plan.r_t];
  return gate(clean, encode_pattern(plan.r_s), plan.mode, true) != clean;
}

std::uint32_t pattern_for_single_signal(SignalId s) {
  return 1023u & ~(1u << (kNumSignals - 1 - static_cast<unsigned>(s)));
}

}  // namespace sntt
