#include "sntt/masking.hpp"

#include <stdexcept>

namespace sntt {

MaskContext draw_mask(std::mt19937_64& rng, const TwiddleTable& w,
                      const NttParams& p) {
  if (w.entries.empty()) throw std::invalid_argument("draw_mask: empty twiddle ROM");
  // modulo reduction keeps draws platform-stable; the ROM size is a power of
  // two so there is no bias at all
  for (int tries = 0; tries < 64; ++tries) {
    const std::size_t idx = static_cast<std::size_t>(rng() % w.entries.size());
    const Residue w_r = w.entries[idx];
    if (w_r % p.q == 0) continue;  // unreachable for prime q, guarded anyway
    return MaskContext{w_r, mod_inverse(w_r, p.q)};
  }
  throw std::domain_error("draw_mask: no nonzero ROM entry found");
}

MaskedPair mask_pair(Residue u, Residue v, const MaskContext& ctx,
                     const BarrettReducer& red) {
  const Residue q = red.q();
  if (u >= q || v >= q) throw std::out_of_range("mask_pair: operand outside [0, q)");
  MaskedPair m;
  m.sum = red.reduce(Wide((u + v) % q) * ctx.w_r);
  m.diff = red.reduce(Wide((u + q - v) % q) * ctx.w_r);
  return m;
}

Residue mask_coeff(Residue x, const MaskContext& ctx, const BarrettReducer& red) {
  if (x >= red.q()) throw std::out_of_range("mask_coeff: operand outside [0, q)");
  return red.reduce(Wide(x) * ctx.w_r);
}

Residue unmask_coeff(Residue x, const MaskContext& ctx,
                     const BarrettReducer& red) {
  if (x >= red.q()) throw std::out_of_range("unmask_coeff: operand outside [0, q)");
  return red.reduce(Wide(x) * ctx.w_r_inv);
}

}  // namespace sntt
