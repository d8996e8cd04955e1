#include "sntt/ntt_core.hpp"

#include <stdexcept>
#include <string>

namespace sntt {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

bool is_odd_prime(Residue q) {
  if (q < 3 || q % 2 == 0) return false;
  for (Residue d = 3; d * d <= q; d += 2)
    if (q % d == 0) return false;
  return true;
}

}  // namespace

Residue mod_pow(Residue base, std::uint64_t exp, Residue q) {
  Wide result = 1;
  Wide b = base % q;
  while (exp) {
    if (exp & 1) result = result * b % q;
    b = b * b % q;
    exp >>= 1;
  }
  return static_cast<Residue>(result);
}

Residue mod_inverse(Residue a, Residue q) {
  if (a % q == 0) throw std::domain_error("mod_inverse: zero has no inverse");
  return mod_pow(a % q, q - 2, q);  // Fermat, q prime
}

Residue find_primitive_root(std::size_t n, Residue q) {
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("find_primitive_root: n must be a power of two >= 2");
  if ((q - 1) % n != 0)
    throw std::domain_error("find_primitive_root: n does not divide q-1, no root exists");
  for (Residue g = 2; g < q; ++g) {
    if (mod_pow(g, n, q) == 1 && mod_pow(g, n / 2, q) == q - 1) return g;
  }
  throw std::domain_error("find_primitive_root: no primitive root found");
}

std::size_t bit_reverse(std::size_t v, unsigned bits) {
  if (bits >= 64 || v >= (std::size_t{1} << bits))
    throw std::out_of_range("bit_reverse: value does not fit in bit width");
  std::size_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

NttParams NttParams::make(std::size_t n, Residue q) {
  NttParams p;
  p.n = n;
  p.q = q;
  p.omega = find_primitive_root(n, q);
  p.omega_inv = mod_inverse(p.omega, q);
  p.n_inv = mod_inverse(static_cast<Residue>(n % q), q);
  p.validate();
  return p;
}

NttParams NttParams::kyber() { return make(256, 3329); }

void NttParams::validate() const {
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("NttParams: n must be a power of two >= 2");
  if (q >= kMaxModulus)
    throw std::invalid_argument("NttParams: q must fit 12 bits");
  if (!is_odd_prime(q))
    throw std::invalid_argument("NttParams: q must be an odd prime");
  if ((q - 1) % n != 0)
    throw std::invalid_argument("NttParams: n must divide q-1");
  if (mod_pow(omega, n, q) != 1 || mod_pow(omega, n / 2, q) != q - 1)
    throw std::invalid_argument("NttParams: omega is not a primitive n-th root");
  if (Wide(omega) * omega_inv % q != 1)
    throw std::invalid_argument("NttParams: omega_inv is wrong");
  if (Wide(n % q) * n_inv % q != 1)
    throw std::invalid_argument("NttParams: n_inv is wrong");
}

unsigned NttParams::log2n() const {
  unsigned l = 0;
  for (std::size_t v = n; v > 1; v >>= 1) ++l;
  return l;
}

BarrettReducer::BarrettReducer(Residue q) : q_(q) {
  if (q < 2 || q >= kMaxModulus)
    throw std::invalid_argument("BarrettReducer: q must be in [2, 2^12)");
  mu_ = (Wide{1} << (2 * kCoeffBits)) / q;
}

Residue BarrettReducer::reduce(Wide x) const {
  if (x >= Wide(q_) * q_)
    throw std::out_of_range("BarrettReducer: input outside [0, q^2)");
  Wide t = (x * mu_) >> (2 * kCoeffBits);
  Wide r = x - t * q_;
  if (r >= q_) r -= q_;  // single conditional correction
  return static_cast<Residue>(r);
}

TwiddleTable TwiddleTable::build(const NttParams& p) {
  p.validate();
  TwiddleTable t;
  t.entries.resize(p.n);
  t.inverse_entries.resize(p.n);
  t.entries[0] = 1;
  t.inverse_entries[0] = 1;
  for (std::size_t e = 1; e < p.n; ++e) {
    t.entries[e] = static_cast<Residue>(Wide(t.entries[e - 1]) * p.omega % p.q);
    t.inverse_entries[e] =
        static_cast<Residue>(Wide(t.inverse_entries[e - 1]) * p.omega_inv % p.q);
  }
  return t;
}

ButterflyResult butterfly(Residue u, Residue a_k1, Residue w,
                          const BarrettReducer& red) {
  const Residue q = red.q();
  if (u >= q || a_k1 >= q || w >= q)
    throw std::out_of_range("butterfly: operand outside [0, q)");
  const Residue v = red.reduce(Wide(a_k1) * w);
  ButterflyResult r;
  r.sum = (u + v) % q;
  r.diff = (u + q - v) % q;
  return r;
}

AddrTriple addr_gen(std::size_t stage, std::size_t block, std::size_t k,
                    std::size_t hl) {
  if (hl == 0 || (hl & (hl - 1)) != 0)
    throw std::out_of_range("addr_gen: hl must be a power of two >= 1");
  if (stage >= 8 * sizeof(std::size_t) || block >= (std::size_t{1} << stage))
    throw std::out_of_range("addr_gen: block index outside [0, 2^stage)");
  if (k >= hl) throw std::out_of_range("addr_gen: butterfly index outside [0, hl)");
  AddrTriple a;
  a.k0 = block * 2 * hl + k;
  a.k1 = a.k0 + hl;
  a.widx = hl * bit_reverse(block, static_cast<unsigned>(stage));
  return a;
}

std::vector<ButterflyOp> butterfly_schedule(std::size_t n) {
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("butterfly_schedule: n must be a power of two >= 2");
  unsigned stages = 0;
  for (std::size_t v = n; v > 1; v >>= 1) ++stages;
  std::vector<ButterflyOp> sched;
  sched.reserve(n / 2 * stages);
  for (std::size_t i = 0; i < stages; ++i) {
    const std::size_t hl = n >> (i + 1);
    for (std::size_t j = 0; j < (std::size_t{1} << i); ++j) {
      for (std::size_t k = 0; k < hl; ++k) {
        sched.push_back(ButterflyOp{i, j, k, hl, addr_gen(i, j, k, hl)});
      }
    }
  }
  return sched;
}

void validate_polynomial(const Polynomial& a, const NttParams& p) {
  if (a.size() != p.n)
    throw std::invalid_argument("polynomial length does not match n");
  for (Residue c : a)
    if (c >= p.q) throw std::out_of_range("coefficient outside [0, q)");
}

Polynomial ntt_behavioral(const Polynomial& a, const NttParams& p) {
  p.validate();
  validate_polynomial(a, p);
  const TwiddleTable tw = TwiddleTable::build(p);
  const BarrettReducer red(p.q);
  Polynomial A = a;
  for (const ButterflyOp& op : butterfly_schedule(p.n)) {
    const Residue w = tw.entries[op.addr.widx];
    const ButterflyResult r = butterfly(A[op.addr.k0], A[op.addr.k1], w, red);
    A[op.addr.k0] = r.sum;
    A[op.addr.k1] = r.diff;
  }
  return A;
}

Polynomial intt_behavioral(const Polynomial& abar, const NttParams& p) {
  p.validate();
  validate_polynomial(abar, p);
  const TwiddleTable tw = TwiddleTable::build(p);
  const BarrettReducer red(p.q);
  const unsigned stages = p.log2n();
  Polynomial a = abar;
  // Mirror of the forward pass: narrow-to-wide Gentleman-Sande butterflies
  // with inverse twiddles, then the aggregate 1/n scale.
  for (unsigned i = stages; i-- > 0;) {
    const std::size_t hl = p.n >> (i + 1);
    for (std::size_t j = 0; j < (std::size_t{1} << i); ++j) {
      for (std::size_t k = 0; k < hl; ++k) {
        const AddrTriple ad = addr_gen(i, j, k, hl);
        const Residue w = tw.inverse_entries[ad.widx];
        const Residue u = a[ad.k0];
        const Residue t = a[ad.k1];
        a[ad.k0] = (u + t) % p.q;
        a[ad.k1] = red.reduce(Wide((u + p.q - t) % p.q) * w);
      }
    }
  }
  for (Residue& c : a) c = red.reduce(Wide(c) * p.n_inv);
  return a;
}

Polynomial to_natural_order(const Polynomial& raw) {
  const std::size_t n = raw.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("length must be a power of two");
  unsigned bits = 0;
  for (std::size_t v = n; v > 1; v >>= 1) ++bits;
  Polynomial nat(n);
  for (std::size_t t = 0; t < n; ++t) nat[t] = raw[bit_reverse(t, bits)];
  return nat;
}

Polynomial from_natural_order(const Polynomial& natural) {
  // bit reversal is an involution, so the maps coincide
  return to_natural_order(natural);
}

Polynomial cyclic_convolution(const Polynomial& a, const Polynomial& b,
                              Residue q) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = a.size();
  Polynomial c(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    Wide acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc = (acc + Wide(a[i]) * b[(k + n - i) % n]) % q;
    }
    c[k] = static_cast<Residue>(acc);
  }
  return c;
}

}  // namespace sntt
