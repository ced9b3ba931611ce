#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "biguint.hpp"

namespace testsupport {

// Exact rational probability. All oracle inputs take rho as a fraction
// p/q of small integers so every intermediate stays an exact integer.
struct Rational {
  BigUint num;
  BigUint den;
  double value() const { return num.ratio(den); }
};

// C(n, 0..n), exact. The running product C*(n-i)/(i+1) divides exactly at
// every step because each prefix is itself a binomial coefficient.
inline std::vector<BigUint> binomial_row(std::uint32_t n) {
  std::vector<BigUint> row;
  row.reserve(n + 1);
  row.emplace_back(1u);
  for (std::uint32_t i = 0; i < n; ++i) {
    BigUint next = row.back();
    next.mul_small(n - i);
    const std::uint32_t rem = next.div_small(i + 1);
    assert(rem == 0);
    (void)rem;
    row.push_back(std::move(next));
  }
  return row;
}

inline BigUint pow_small(std::uint32_t base, std::uint32_t e) {
  BigUint out(1);
  for (std::uint32_t i = 0; i < e; ++i) out.mul_small(base);
  return out;
}

// Probability that Binomial(K, p/q) lands in [0, b] or [K-b, K]; defined
// as exactly 1 when the two tails meet or overlap (2b+1 >= K), which
// covers the b/K = 1/2 case.
inline Rational exact_duty_deviation(std::uint32_t K, std::uint32_t p,
                                     std::uint32_t q, std::uint32_t b) {
  Rational r;
  r.den = pow_small(q, K);
  if (2ull * b + 1 >= K) {
    r.num = r.den;
    return r;
  }
  const std::vector<BigUint> C = binomial_row(K);
  BigUint acc;
  for (std::uint32_t i = 0; i <= b; ++i) {
    BigUint lo = C[i] * pow_small(p, i);
    lo = lo * pow_small(q - p, K - i);
    acc += lo;
    BigUint hi = C[K - i] * pow_small(p, K - i);
    hi = hi * pow_small(q - p, i);
    acc += hi;
  }
  r.num = std::move(acc);
  return r;
}

// P(X >= n) for X ~ Binomial(cells, P_dev) at several n in one pass over
// the exact terms; ns must be <= cells. The suffix sum is accumulated
// walking i downward and snapshotted at each requested threshold.
inline std::vector<Rational> exact_tail_set(std::uint32_t K, std::uint32_t p,
                                            std::uint32_t q, std::uint32_t b,
                                            std::uint32_t cells,
                                            const std::vector<std::uint64_t>& ns) {
  const Rational dev = exact_duty_deviation(K, p, q, b);
  BigUint miss = dev.den;
  miss -= dev.num;

  std::vector<BigUint> hit_pow(cells + 1);
  std::vector<BigUint> miss_pow(cells + 1);
  hit_pow[0] = BigUint(1);
  miss_pow[0] = BigUint(1);
  for (std::uint32_t i = 1; i <= cells; ++i) {
    hit_pow[i] = hit_pow[i - 1] * dev.num;
    miss_pow[i] = miss_pow[i - 1] * miss;
  }
  const std::vector<BigUint> C = binomial_row(cells);

  BigUint den(1);
  for (std::uint32_t i = 0; i < cells; ++i) den = den * dev.den;

  // suffix[n] filled as the walk passes each threshold
  std::vector<Rational> out(ns.size());
  BigUint acc;
  std::uint32_t i = cells + 1;
  while (i-- > 0) {
    acc += C[i] * hit_pow[i] * miss_pow[cells - i];
    for (std::size_t k = 0; k < ns.size(); ++k) {
      if (ns[k] == i) {
        out[k].num = acc;
        out[k].den = den;
      }
    }
  }
  for (std::size_t k = 0; k < ns.size(); ++k) {
    assert(ns[k] <= cells);
    if (ns[k] == 0) {  // P(X >= 0) is 1 by definition
      out[k].num = den;
      out[k].den = den;
    }
  }
  return out;
}

// Probability that at least n of `cells` independent cells deviate, with
// the per-cell probability taken exactly from exact_duty_deviation.
inline Rational exact_at_least_n(std::uint32_t K, std::uint32_t p,
                                 std::uint32_t q, std::uint32_t b,
                                 std::uint32_t cells, std::uint64_t n) {
  Rational r;
  if (n == 0) {
    r.num = BigUint(1);
    r.den = BigUint(1);
    return r;
  }
  if (n > cells) {
    r.num = BigUint(0);
    r.den = BigUint(1);
    return r;
  }
  const Rational dev = exact_duty_deviation(K, p, q, b);
  BigUint miss = dev.den;
  miss -= dev.num;

  std::vector<BigUint> hit_pow(cells + 1);
  std::vector<BigUint> miss_pow(cells + 1);
  hit_pow[0] = BigUint(1);
  miss_pow[0] = BigUint(1);
  for (std::uint32_t i = 1; i <= cells; ++i) {
    hit_pow[i] = hit_pow[i - 1] * dev.num;
    miss_pow[i] = miss_pow[i - 1] * miss;
  }
  const std::vector<BigUint> C = binomial_row(cells);
  BigUint acc;
  for (std::uint32_t i = static_cast<std::uint32_t>(n); i <= cells; ++i) {
    acc += C[i] * hit_pow[i] * miss_pow[cells - i];
  }
  r.num = std::move(acc);
  r.den = BigUint(1);
  for (std::uint32_t i = 0; i < cells; ++i) r.den = r.den * dev.den;
  return r;
}

}  // namespace testsupport
