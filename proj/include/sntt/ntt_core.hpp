#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Arithmetic core: modular helpers, Barrett reduction, twiddle tables and the
// behavioral (non-pipelined) cyclic NTT/INTT used as the golden reference by
// the cycle-accurate engine and by every test oracle.
namespace sntt {

using Residue = std::uint32_t;
using Wide = std::uint64_t;
using Polynomial = std::vector<Residue>;

// Coefficients are 12-bit residues; all moduli must fit that width so the
// Barrett constant floor(2^24 / q) covers the full product range.
inline constexpr unsigned kCoeffBits = 12;
inline constexpr Residue kMaxModulus = Residue(1) << kCoeffBits;  // exclusive

Residue mod_pow(Residue base, std::uint64_t exp, Residue q);
Residue mod_inverse(Residue a, Residue q);  // q prime

// Smallest g with g^n = 1 and g^(n/2) = q-1 (mod q). Throws std::domain_error
// when no primitive n-th root exists (n must divide q-1).
Residue find_primitive_root(std::size_t n, Residue q);

// Reverse the low `bits` bits of v. Throws std::out_of_range if v >= 2^bits.
std::size_t bit_reverse(std::size_t v, unsigned bits);

struct NttParams {
  std::size_t n = 0;      // power of two, >= 2
  Residue q = 0;          // odd prime, q < 2^12, n | q-1
  Residue omega = 0;      // primitive n-th root of unity mod q
  Residue omega_inv = 0;
  Residue n_inv = 0;

  static NttParams make(std::size_t n, Residue q);  // scans for omega
  static NttParams kyber();                         // n=256, q=3329, omega=17

  void validate() const;  // throws std::invalid_argument on any breach
  unsigned log2n() const;
  std::size_t butterflies() const { return n / 2 * log2n(); }
};

// mu = floor(2^24 / q); reduce() handles any x < q^2 with one conditional
// correction after the quotient estimate.
class BarrettReducer {
 public:
  explicit BarrettReducer(Residue q);
  Residue reduce(Wide x) const;  // throws std::out_of_range if x >= q^2
  Residue q() const { return q_; }
  Wide mu() const { return mu_; }

 private:
  Residue q_;
  Wide mu_;
};

// entries[e] = omega^e, inverse_entries[e] = omega^-e, e in [0, n).
struct TwiddleTable {
  std::vector<Residue> entries;
  std::vector<Residue> inverse_entries;
  static TwiddleTable build(const NttParams& p);
};

struct ButterflyResult {
  Residue sum;   // (u + a_k1*w) mod q
  Residue diff;  // (u - a_k1*w) mod q
};
ButterflyResult butterfly(Residue u, Residue a_k1, Residue w,
                          const BarrettReducer& red);

// Address bundle for one butterfly: coefficient pair plus the twiddle-ROM
// address, which is derived through bit reversal of the block index.
struct AddrTriple {
  std::size_t k0;
  std::size_t k1;
  std::size_t widx;
};

// stage in [0, log2 n), block in [0, 2^stage), k in [0, hl), hl = n >> (stage+1).
//   k0 = block*2*hl + k, k1 = k0 + hl, widx = hl * bit_reverse(block, stage)
AddrTriple addr_gen(std::size_t stage, std::size_t block, std::size_t k,
                    std::size_t hl);

struct ButterflyOp {
  std::size_t stage;
  std::size_t block;
  std::size_t k;
  std::size_t hl;
  AddrTriple addr;
};

// Every butterfly of the transform in issue order (stage-major, then block,
// then k) — the exact order the pipelined engine reads them.
std::vector<ButterflyOp> butterfly_schedule(std::size_t n);

// Iterative cyclic NTT, natural-order input. Output is in the algorithm's raw
// order: raw[r] = sum_m a[m] * omega^(bit_reverse(r) * m).
Polynomial ntt_behavioral(const Polynomial& a, const NttParams& p);

// Exact inverse of ntt_behavioral (consumes raw order, returns natural order).
Polynomial intt_behavioral(const Polynomial& abar, const NttParams& p);

// Permutation between raw order and natural (evaluation-index) order:
// natural[t] = raw[bit_reverse(t)].
Polynomial to_natural_order(const Polynomial& raw);
Polynomial from_natural_order(const Polynomial& natural);

// Schoolbook cyclic convolution, O(n^2) — test oracle helper.
Polynomial cyclic_convolution(const Polynomial& a, const Polynomial& b,
                              Residue q);

void validate_polynomial(const Polynomial& a, const NttParams& p);

}  // namespace sntt
