#pragma once

#include <cstdint>
#include <random>

#include "sntt/ntt_core.hpp"

// Local multiplicative masking of coefficient-memory writes: each write stores
// (u +/- v) * w_r mod q for a w_r drawn from the twiddle ROM. Contexts are
// retained per write so the masked image can be unmasked and checked.
namespace sntt {

struct MaskContext {
  Residue w_r = 1;
  Residue w_r_inv = 1;

  bool identity() const { return w_r == 1; }
  static MaskContext unit() { return MaskContext{1, 1}; }
};

// Uniform draw over the nonzero twiddle-ROM entries (all entries of a prime
// modulus ROM are nonzero; w_r = 1 is a legal degenerate draw). Deterministic
// for a given engine state.
MaskContext draw_mask(std::mt19937_64& rng, const TwiddleTable& w,
                      const NttParams& p);

struct MaskedPair {
  Residue sum;   // (u + v) * w_r mod q
  Residue diff;  // (u - v) * w_r mod q
};

// Masks the butterfly outputs of an already twiddled operand pair:
// u is the buffered coefficient, v the reduced product a_k1 * w.
MaskedPair mask_pair(Residue u, Residue v, const MaskContext& ctx,
                     const BarrettReducer& red);

Residue mask_coeff(Residue x, const MaskContext& ctx, const BarrettReducer& red);
Residue unmask_coeff(Residue x, const MaskContext& ctx,
                     const BarrettReducer& red);

enum class MaskMode {
  per_write,  // fresh w_r for every write cycle (default)
  per_run,    // one w_r drawn at run start
  off,        // identity context everywhere
};

}  // namespace sntt
