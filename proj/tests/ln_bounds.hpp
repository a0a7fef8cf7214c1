#pragma once

// Rational enclosures of natural logarithms from the atanh series, used to
// check the certified depth independently of MPFR.

#include "pdpomdp/rational.hpp"

#include <utility>

namespace testing {

using pdpomdp::Integer;
using pdpomdp::Rational;

/// [lo, hi] with lo <= ln(x) <= hi and hi - lo < 2^-bits, for 1 <= x < 2.
inline std::pair<Rational, Rational> ln_small(const Rational& x, unsigned bits) {
  const Rational y = (x - 1) / (x + 1);
  const Rational y2 = y * y;
  Rational power = y;  // y^(2k+1)
  Rational sum = 0;
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits + 2);
  const Rational eps = Rational(1) / Rational(scale);
  for (unsigned long k = 0;; ++k) {
    sum += power / Rational(2 * k + 1);
    power *= y2;
    // Remaining terms are below power / ((2k+3)(1 - y^2)).
    Rational tail = power / (Rational(2 * k + 3) * (1 - y2));
    if (2 * tail < eps || y == 0) return {2 * sum, 2 * (sum + tail)};
  }
}

/// Enclosure of ln(x) for x >= 1 via x = 2^k * r with 1 <= r < 2.
inline std::pair<Rational, Rational> ln_enclosure(Rational x, unsigned bits) {
  unsigned long k = 0;
  while (x >= 2) {
    x /= 2;
    ++k;
  }
  auto [l2lo, l2hi] = ln_small(Rational(2), bits + 16);
  auto [rlo, rhi] = ln_small(x, bits + 16);
  return {Rational(k) * l2lo + rlo, Rational(k) * l2hi + rhi};
}

inline Integer ceil_of(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

/// ceil((N/c) * ((n+1) ln 2 + ln(1/eps))) from both ends of the enclosure;
/// the two agree unless the exact product is within 2^-64 of an integer.
inline std::pair<Integer, Integer> certified_depth_oracle(std::size_t n, const Rational& p_min, const Rational& eps) {
  const Rational eta = eps / Rational(2 * n);
  Integer big_n, two_n;
  mpz_ui_pow_ui(big_n.get_mpz_t(), 2, n + 1);
  mpz_ui_pow_ui(two_n.get_mpz_t(), 2, n);
  Rational base = p_min * eta;
  Rational c = 1;
  for (unsigned long i = 0; i < big_n.get_ui(); ++i) c *= base;
  c /= Rational(two_n);
  const Rational factor = Rational(big_n) / c;
  const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(factor.get_num_mpz_t(), 2)) + 64;
  auto [l2lo, l2hi] = ln_enclosure(Rational(2), bits);
  auto [lelo, lehi] = ln_enclosure(1 / eps, bits);
  Rational lo = Rational(n + 1) * l2lo + lelo;
  Rational hi = Rational(n + 1) * l2hi + lehi;
  return {ceil_of(factor * lo), ceil_of(factor * hi)};
}

}  // namespace testing
