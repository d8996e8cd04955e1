// Arithmetic core tests. Every expected value here was computed by an
// independent oracle (direct modular arithmetic, schoolbook evaluation, or
// hand calculation) and frozen as a literal — never by running the functions
// under test and pasting their output.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "sntt/ntt_core.hpp"

using namespace sntt;

namespace {

// Independent evaluation oracle: raw[r] = sum_m a[m] * omega^(bitrev(r) * m),
// computed straight from the definition with 64-bit accumulation.
Polynomial eval_oracle(const Polynomial& a, const NttParams& p) {
  Polynomial out(p.n, 0);
  for (std::size_t r = 0; r < p.n; ++r) {
    const std::size_t t = bit_reverse(r, p.log2n());
    Wide acc = 0;
    for (std::size_t m = 0; m < p.n; ++m) {
      const Wide term =
          Wide(a[m]) * mod_pow(p.omega, Wide(t) * m % p.n, p.q) % p.q;
      acc = (acc + term) % p.q;
    }
    out[r] = static_cast<Residue>(acc);
  }
  return out;
}

Polynomial random_poly(std::mt19937_64& rng, const NttParams& p) {
  Polynomial a(p.n);
  for (auto& c : a) c = static_cast<Residue>(rng() % p.q);
  return a;
}

}  // namespace

TEST_CASE("mod_pow matches repeated multiplication") {
  // Frozen scalars: 2^10 mod 17 = 1024 - 60*17 = 4; 3^5 mod 7 = 243 mod 7 = 5.
  CHECK(mod_pow(2, 10, 17) == 4);
  CHECK(mod_pow(3, 5, 7) == 5);
  CHECK(mod_pow(5, 0, 17) == 1);
  CHECK(mod_pow(0, 5, 17) == 0);
  CHECK(mod_pow(0, 0, 17) == 1);  // empty product convention
  // Exhaustive cross-check against a naive loop for q = 17.
  for (Residue b = 0; b < 17; ++b) {
    Wide acc = 1;
    for (std::uint64_t e = 0; e < 40; ++e) {
      CHECK(mod_pow(b, e, 17) == acc);
      acc = acc * b % 17;
    }
  }
}

TEST_CASE("mod_inverse is a true inverse and rejects zero") {
  for (Residue q : {Residue(5), Residue(17), Residue(97), Residue(3329)}) {
    for (Residue a = 1; a < std::min<Residue>(q, 200); ++a) {
      CHECK(Wide(a) * mod_inverse(a, q) % q == 1);
    }
  }
  CHECK(Wide(3328) * mod_inverse(3328, 3329) % 3329 == 1);
  CHECK_THROWS_AS((void)mod_inverse(0, 17), std::domain_error);
  CHECK_THROWS_AS((void)mod_inverse(17, 17), std::domain_error);
}

TEST_CASE("find_primitive_root frozen values") {
  // Each root verified by hand: g^n = 1, g^(n/2) = q-1, g minimal.
  CHECK(find_primitive_root(256, 3329) == 17);
  CHECK(find_primitive_root(8, 17) == 2);
  CHECK(find_primitive_root(16, 17) == 3);
  CHECK(find_primitive_root(4, 17) == 4);
  CHECK(find_primitive_root(2, 5) == 4);
  CHECK(find_primitive_root(4, 5) == 2);
  CHECK(find_primitive_root(2, 17) == 16);  // only element of order 2

  // Root properties hold for every returned value.
  for (auto [n, q] : std::vector<std::pair<std::size_t, Residue>>{
           {2, 5}, {4, 17}, {8, 17}, {16, 17}, {64, 3329}, {256, 3329}}) {
    const Residue g = find_primitive_root(n, q);
    CHECK(mod_pow(g, n, q) == 1);
    CHECK(mod_pow(g, n / 2, q) == q - 1);
  }

  CHECK_THROWS_AS((void)find_primitive_root(8, 5), std::domain_error);    // 8 | 4 fails
  CHECK_THROWS_AS((void)find_primitive_root(512, 3329), std::domain_error);
  CHECK_THROWS_AS((void)find_primitive_root(6, 17), std::invalid_argument);
  CHECK_THROWS_AS((void)find_primitive_root(1, 17), std::invalid_argument);
}

TEST_CASE("bit_reverse frozen values and bounds") {
  CHECK(bit_reverse(0, 0) == 0);
  CHECK(bit_reverse(0, 8) == 0);
  CHECK(bit_reverse(1, 3) == 4);   // 001 -> 100
  CHECK(bit_reverse(3, 4) == 12);  // 0011 -> 1100
  CHECK(bit_reverse(5, 3) == 5);   // palindrome
  CHECK(bit_reverse(6, 3) == 3);   // 110 -> 011
  CHECK(bit_reverse(2, 2) == 1);
  CHECK(bit_reverse(255, 8) == 255);
  CHECK(bit_reverse(1, 8) == 128);
  // Involution over the full 8-bit range.
  for (std::size_t v = 0; v < 256; ++v) CHECK(bit_reverse(bit_reverse(v, 8), 8) == v);
  CHECK_THROWS_AS((void)bit_reverse(8, 3), std::out_of_range);
  CHECK_THROWS_AS((void)bit_reverse(1, 0), std::out_of_range);
}

TEST_CASE("NttParams construction and validation") {
  const NttParams k = NttParams::kyber();
  CHECK(k.n == 256);
  CHECK(k.q == 3329);
  CHECK(k.omega == 17);
  CHECK(Wide(k.omega) * k.omega_inv % k.q == 1);
  CHECK(Wide(k.n % k.q) * k.n_inv % k.q == 1);
  CHECK(k.log2n() == 8);
  CHECK(k.butterflies() == 1024);
  CHECK_NOTHROW(k.validate());

  const NttParams p8 = NttParams::make(8, 17);
  CHECK(p8.omega == 2);
  CHECK(p8.omega_inv == 9);   // 2*9 = 18 = 17+1
  CHECK(p8.n_inv == 15);      // 8*15 = 120 = 7*17+1
  CHECK(p8.butterflies() == 12);
  CHECK(NttParams::make(16, 17).omega == 3);
  CHECK(NttParams::make(4, 17).omega == 4);
  CHECK(NttParams::make(2, 5).omega == 4);

  CHECK_THROWS_AS((void)NttParams::make(6, 17), std::invalid_argument);
  CHECK_THROWS_AS((void)NttParams::make(1, 17), std::invalid_argument);
  CHECK_THROWS_AS((void)NttParams::make(32, 17), std::domain_error);  // 32 does not divide 16

  NttParams bad = p8;
  bad.q = 16;  // even
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.q = 4099;  // prime but over 12 bits
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.omega = 3;  // order 16 element, not a primitive 8th root
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.omega_inv = 5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.n_inv = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p8;
  bad.q = 15;  // odd composite
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Barrett constant frozen values") {
  // mu = floor(2^24 / q), verified by long division:
  //   3329 * 5039 = 16774831 <= 2^24 < 3329 * 5040
  //   17 * 986895 = 16777215 = 2^24 - 1
  //   97 * 172960 = 16777120 <= 2^24 < 97 * 172961
  CHECK(BarrettReducer(3329).mu() == 5039);
  CHECK(BarrettReducer(17).mu() == 986895);
  CHECK(BarrettReducer(97).mu() == 172960);
  CHECK_THROWS_AS(BarrettReducer(4096), std::invalid_argument);
  CHECK_THROWS_AS(BarrettReducer(1), std::invalid_argument);
  CHECK_THROWS_AS(BarrettReducer(0), std::invalid_argument);
}

TEST_CASE("Barrett reduction exhaustive for small moduli") {
  for (Residue q : {Residue(17), Residue(97)}) {
    const BarrettReducer red(q);
    for (Wide x = 0; x < Wide(q) * q; ++x) CHECK(red.reduce(x) == x % q);
    CHECK_THROWS_AS((void)red.reduce(Wide(q) * q), std::out_of_range);
  }
}

TEST_CASE("Barrett reduction randomized and boundary for the 12-bit prime") {
  const Residue q = 3329;
  const BarrettReducer red(q);
  const Wide q2 = Wide(q) * q;
  for (Wide x : {Wide(0), Wide(1), Wide(q - 1), Wide(q), Wide(q + 1), q2 - 1,
                 q2 - q, Wide(q) * (q - 1)}) {
    CHECK(red.reduce(x) == x % q);
  }
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000000; ++i) {
    const Wide x = rng() % q2;
    CHECK(red.reduce(x) == x % q);
  }
  CHECK_THROWS_AS((void)red.reduce(q2), std::out_of_range);
  CHECK_THROWS_AS((void)red.reduce(~Wide(0)), std::out_of_range);
}

TEST_CASE("butterfly frozen example and exhaustive small-field check") {
  const BarrettReducer red(3329);
  // u=5, v=7, w=17: v*w = 119; sum = 124; diff = 5 - 119 = -114 = 3215 mod q.
  const ButterflyResult r = butterfly(5, 7, 17, red);
  CHECK(r.sum == 124);
  CHECK(r.diff == 3215);

  const ButterflyResult z = butterfly(0, 0, 1, red);
  CHECK(z.sum == 0);
  CHECK(z.diff == 0);

  const BarrettReducer red17(17);
  for (Residue u = 0; u < 17; ++u)
    for (Residue v = 0; v < 17; ++v)
      for (Residue w = 0; w < 17; ++w) {
        const ButterflyResult b = butterfly(u, v, w, red17);
        const Residue t = static_cast<Residue>(Wide(v) * w % 17);
        CHECK(b.sum == (u + t) % 17);
        CHECK(b.diff == (u + 17 - t) % 17);
      }

  CHECK_THROWS_AS((void)butterfly(3329, 0, 1, red), std::out_of_range);
  CHECK_THROWS_AS((void)butterfly(0, 3329, 1, red), std::out_of_range);
}

TEST_CASE("twiddle table frozen for the 8-point field") {
  const NttParams p = NttParams::make(8, 17);
  const TwiddleTable t = TwiddleTable::build(p);
  // Powers of 2 mod 17 and of its inverse 9 mod 17, computed by hand.
  CHECK(t.entries == std::vector<Residue>{1, 2, 4, 8, 16, 15, 13, 9});
  CHECK(t.inverse_entries == std::vector<Residue>{1, 9, 13, 15, 16, 8, 4, 2});

  const NttParams k = NttParams::kyber();
  const TwiddleTable tk = TwiddleTable::build(k);
  REQUIRE(tk.entries.size() == 256);
  REQUIRE(tk.inverse_entries.size() == 256);
  CHECK(tk.entries[0] == 1);
  CHECK(tk.entries[1] == 17);
  CHECK(tk.entries[128] == 3328);  // omega^(n/2) = q-1
  for (std::size_t e = 0; e < 256; ++e) {
    CHECK(tk.entries[e] == mod_pow(17, e, 3329));
    CHECK(Wide(tk.entries[e]) * tk.inverse_entries[e] % 3329 == 1);
  }
}

TEST_CASE("address generation frozen trace for the 8-point schedule") {
  // Full issue-order address trace, derived by hand from
  // k0 = block*2*hl + k, k1 = k0 + hl, widx = hl * bitrev(block, stage).
  struct Triple {
    std::size_t k0, k1, widx;
  };
  const std::vector<Triple> expect = {
      {0, 4, 0}, {1, 5, 0}, {2, 6, 0}, {3, 7, 0},  // stage 0, hl=4
      {0, 2, 0}, {1, 3, 0}, {4, 6, 2}, {5, 7, 2},  // stage 1, hl=2
      {0, 1, 0}, {2, 3, 2}, {4, 5, 1}, {6, 7, 3},  // stage 2, hl=1
  };
  const auto sched = butterfly_schedule(8);
  REQUIRE(sched.size() == 12);
  for (std::size_t i = 0; i < sched.size(); ++i) {
    CHECK(sched[i].addr.k0 == expect[i].k0);
    CHECK(sched[i].addr.k1 == expect[i].k1);
    CHECK(sched[i].addr.widx == expect[i].widx);
    CHECK(sched[i].addr.k1 - sched[i].addr.k0 == sched[i].hl);
  }
  // Stage-major issue order.
  for (std::size_t i = 1; i < sched.size(); ++i)
    CHECK(sched[i].stage >= sched[i - 1].stage);
}

TEST_CASE("address generation partitions every stage") {
  for (std::size_t n : {std::size_t(8), std::size_t(16), std::size_t(256)}) {
    const auto sched = butterfly_schedule(n);
    const unsigned stages = static_cast<unsigned>(std::countr_zero(n));
    REQUIRE(sched.size() == n / 2 * stages);
    for (unsigned s = 0; s < stages; ++s) {
      std::set<std::size_t> touched;
      for (const auto& op : sched) {
        if (op.stage != s) continue;
        CHECK(op.addr.k1 == op.addr.k0 + op.hl);
        CHECK(op.addr.widx < n / 2);
        CHECK(touched.insert(op.addr.k0).second);
        CHECK(touched.insert(op.addr.k1).second);
      }
      // Each stage touches every coefficient exactly once.
      CHECK(touched.size() == n);
      CHECK(*touched.rbegin() == n - 1);
    }
  }
  CHECK_THROWS_AS((void)butterfly_schedule(6), std::invalid_argument);
  CHECK_THROWS_AS((void)addr_gen(1, 2, 0, 2), std::out_of_range);  // block >= 2^stage
  CHECK_THROWS_AS((void)addr_gen(0, 0, 4, 4), std::out_of_range);  // k >= hl
  CHECK_THROWS_AS((void)addr_gen(0, 0, 0, 3), std::out_of_range);  // hl not a power of two
}

TEST_CASE("forward transform frozen 4-point vector") {
  // Hand-evaluated: omega=4 mod 17, input [1,2,3,4]; raw[r] indexed by
  // bitrev(r): [10, 15, 7, 6].
  const NttParams p = NttParams::make(4, 17);
  CHECK(ntt_behavioral({1, 2, 3, 4}, p) == Polynomial{10, 15, 7, 6});
  // 2-point: omega=4 mod 5, input [2,3]: [ (2+3)%5, (2+3*4)%5 ] = [0, 4].
  const NttParams p2 = NttParams::make(2, 5);
  CHECK(ntt_behavioral({2, 3}, p2) == Polynomial{0, 4});
}

TEST_CASE("forward transform equals the evaluation oracle") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {std::size_t(2), std::size_t(4), std::size_t(8),
                        std::size_t(16)}) {
    const NttParams p = NttParams::make(n, 17);
    for (int it = 0; it < 25; ++it) {
      const Polynomial a = random_poly(rng, p);
      CHECK(ntt_behavioral(a, p) == eval_oracle(a, p));
    }
    // Basis vectors exhaustively: transform of e_m is the m-th power column.
    for (std::size_t m = 0; m < n; ++m) {
      Polynomial e(n, 0);
      e[m] = 1;
      CHECK(ntt_behavioral(e, p) == eval_oracle(e, p));
    }
  }
  const NttParams k = NttParams::kyber();
  for (int it = 0; it < 5; ++it) {
    const Polynomial a = random_poly(rng, k);
    CHECK(ntt_behavioral(a, k) == eval_oracle(a, k));
  }
  // Constant input: raw[r] = n*c at r with bitrev(r)=0, i.e. r=0, else 0.
  Polynomial c(k.n, 3);
  Polynomial raw = ntt_behavioral(c, k);
  CHECK(raw[0] == Wide(256) * 3 % 3329);
  for (std::size_t r = 1; r < k.n; ++r) CHECK(raw[r] == 0);
}

TEST_CASE("inverse transform is exact on every size") {
  std::mt19937_64 rng(11);
  for (auto [n, q] : std::vector<std::pair<std::size_t, Residue>>{
           {2, 5}, {4, 17}, {8, 17}, {16, 17}, {256, 3329}}) {
    const NttParams p = NttParams::make(n, q);
    const int iters = (n == 256) ? 5 : 20;
    for (int it = 0; it < iters; ++it) {
      const Polynomial a = random_poly(rng, p);
      CHECK(intt_behavioral(ntt_behavioral(a, p), p) == a);
    }
  }
}

TEST_CASE("order permutations invert each other") {
  const Polynomial raw = {10, 11, 12, 13, 14, 15, 16, 0};
  const Polynomial nat = to_natural_order(raw);
  // natural[t] = raw[bitrev(t, 3)].
  CHECK(nat == Polynomial{10, 14, 12, 16, 11, 15, 13, 0});
  CHECK(from_natural_order(nat) == raw);
  CHECK(to_natural_order(from_natural_order(raw)) == raw);
  CHECK_THROWS_AS((void)to_natural_order(Polynomial(6, 0)), std::invalid_argument);
}

TEST_CASE("convolution theorem against the schoolbook product") {
  // Frozen 4-point case, hand-computed: [1,2,3,4] (*) [1,1,0,0] mod 17 =
  // [5, 3, 5, 7].
  CHECK(cyclic_convolution({1, 2, 3, 4}, {1, 1, 0, 0}, 17) ==
        Polynomial{5, 3, 5, 7});
  CHECK_THROWS_AS((void)cyclic_convolution({1, 2}, {1, 2, 3, 4}, 17),
                  std::invalid_argument);

  std::mt19937_64 rng(13);
  for (auto [n, q] : std::vector<std::pair<std::size_t, Residue>>{
           {4, 17}, {8, 17}, {16, 17}, {256, 3329}}) {
    const NttParams p = NttParams::make(n, q);
    const BarrettReducer red(q);
    const int iters = (n == 256) ? 5 : 20;
    for (int it = 0; it < iters; ++it) {
      const Polynomial a = random_poly(rng, p);
      const Polynomial b = random_poly(rng, p);
      // Independent naive convolution, written out in the test.
      Polynomial naive(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          naive[(i + j) % n] =
              static_cast<Residue>((naive[(i + j) % n] + Wide(a[i]) * b[j]) % q);
      CHECK(cyclic_convolution(a, b, q) == naive);

      Polynomial ra = ntt_behavioral(a, p);
      const Polynomial rb = ntt_behavioral(b, p);
      for (std::size_t i = 0; i < n; ++i)
        ra[i] = red.reduce(Wide(ra[i]) * rb[i]);
      CHECK(intt_behavioral(ra, p) == naive);
    }
  }
}

TEST_CASE("polynomial validation") {
  const NttParams p = NttParams::make(8, 17);
  CHECK_NOTHROW(validate_polynomial(Polynomial(8, 16), p));
  CHECK_THROWS_AS(validate_polynomial(Polynomial(7, 0), p), std::invalid_argument);
  CHECK_THROWS_AS(validate_polynomial(Polynomial(8, 17), p), std::out_of_range);
}
