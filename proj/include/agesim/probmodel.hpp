#pragma once

#include <cstdint>
#include <vector>

namespace agesim {

// Closed-form binomial model of per-cell duty-cycle deviation. A cell
// written K times with i.i.d. Bernoulli(rho) bits has ones-count i; its
// duty-cycle i/K deviates at least as far from 0.5 as b/K when i <= b or
// i >= K-b. p_duty_deviation returns the probability of that event,
// except it is defined as exactly 1 when b/K = 0.5.
double p_duty_deviation(std::uint32_t K, double rho, std::uint32_t b);

// Probability that at least n of `cells` independent cells deviate, i.e.
// the upper tail of Binomial(cells, p_duty_deviation(K, rho, b)) at n.
double p_at_least_n(std::uint32_t K, double rho, std::uint32_t b,
                    std::uint64_t cells, std::uint64_t n);

struct CurvePoint {
  std::uint32_t b = 0;
  double b_over_K = 0.0;
  double P = 0.0;
};

// One point per b in [0, floor(K/2)]; P is non-decreasing in b and the
// final point is 1 when K is even.
std::vector<CurvePoint> deviation_curve(std::uint32_t K, double rho);

}  // namespace agesim
