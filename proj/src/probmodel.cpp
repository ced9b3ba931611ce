#include "agesim/probmodel.hpp"

#include <algorithm>
#include <cmath>

#include "agesim/errors.hpp"

namespace agesim {

namespace {

// Compensated accumulator; all addends here are non-negative, so the
// compensation keeps the relative error near machine epsilon regardless
// of summation order.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct LogPmf {
  std::uint32_t n;
  double lg_n1;  // lgamma(n+1)
  double log_p;
  double log_q;
  double term(std::uint64_t i) const {
    return std::exp(lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                    std::lgamma(static_cast<double>(n - i) + 1.0) +
                    static_cast<double>(i) * log_p +
                    static_cast<double>(n - i) * log_q);
  }
};

LogPmf make_pmf(std::uint32_t n, double p, double q) {
  return {n, std::lgamma(static_cast<double>(n) + 1.0), std::log(p),
          std::log(q)};
}

// Both tails and the middle mass of Binomial(K, rho), each summed
// directly so neither side suffers 1-x cancellation.
struct Deviation {
  double tails;   // P(i <= b or i >= K-b)
  double middle;  // P(b < i < K-b), complement computed independently
};

Deviation deviation_parts(std::uint32_t K, double rho, std::uint32_t b) {
  // The ones-count under rho and 1-rho are mirror images and the tail
  // event is mirror-symmetric, so canonicalize for exact symmetry.
  const double r = std::min(rho, 1.0 - rho);
  if (r <= 0.0) return {1.0, 0.0};  // all mass at i = 0 (or i = K)
  if (2ull * b + 1 >= K) return {1.0, 0.0};  // tails cover the support

  const LogPmf pmf = make_pmf(K, r, 1.0 - r);
  Kahan tails;
  // outward-in: tail terms grow toward the mode, so small terms first
  for (std::uint32_t i = 0; i <= b; ++i) {
    tails.add(pmf.term(i));
    tails.add(pmf.term(K - i));
  }
  Kahan middle;
  for (std::uint32_t i = b + 1; i <= K - b - 1; ++i) middle.add(pmf.term(i));
  return {std::min(tails.sum, 1.0), std::min(middle.sum, 1.0)};
}

void check_params(std::uint32_t K, double rho, std::uint32_t b) {
  require(K >= 1, "K must be >= 1");
  require(rho >= 0.0 && rho <= 1.0, "rho must be in [0,1]");
  require(b <= K / 2, "b must be in [0, floor(K/2)]");
}

}  // namespace

double p_duty_deviation(std::uint32_t K, double rho, std::uint32_t b) {
  check_params(K, rho, b);
  return deviation_parts(K, rho, b).tails;
}

double p_at_least_n(std::uint32_t K, double rho, std::uint32_t b,
                    std::uint64_t cells, std::uint64_t n) {
  check_params(K, rho, b);
  require(cells >= 1, "cells must be >= 1");
  require(n <= cells, "n must be in [0, cells]");
  if (n == 0) return 1.0;

  const Deviation dev = deviation_parts(K, rho, b);
  const double p = dev.tails;
  const double q = dev.middle;
  if (q <= 0.0) return 1.0;           // every cell deviates
  if (p <= 0.0) return 0.0;           // n >= 1 but no cell can deviate
  require(cells <= (1ull << 32), "cell count too large for the tail sum");

  // Both masses were summed directly, so take each log from the side
  // that is small; log1p of the other side would cancel.
  const double log_p = p <= 0.5 ? std::log(p) : std::log1p(-q);
  const double log_q = q <= 0.5 ? std::log(q) : std::log1p(-p);
  const LogPmf pmf{static_cast<std::uint32_t>(cells),
                   std::lgamma(static_cast<double>(cells) + 1.0), log_p,
                   log_q};
  // Sum whichever tail is shorter; both contain only positive terms.
  const double mean = static_cast<double>(cells) * p;
  Kahan acc;
  if (static_cast<double>(n) <= mean) {
    for (std::uint64_t i = 0; i < n; ++i) acc.add(pmf.term(i));
    return std::clamp(1.0 - acc.sum, 0.0, 1.0);
  }
  for (std::uint64_t i = cells; i >= n; --i) acc.add(pmf.term(i));
  return std::min(acc.sum, 1.0);
}

std::vector<CurvePoint> deviation_curve(std::uint32_t K, double rho) {
  require(K >= 1, "K must be >= 1");
  require(rho >= 0.0 && rho <= 1.0, "rho must be in [0,1]");

  const double r = std::min(rho, 1.0 - rho);
  const std::uint32_t b_max = K / 2;
  std::vector<CurvePoint> curve(b_max + 1);

  Kahan acc;
  const bool degenerate = r <= 0.0;
  const LogPmf pmf = degenerate ? LogPmf{} : make_pmf(K, r, 1.0 - r);
  for (std::uint32_t b = 0; b <= b_max; ++b) {
    double P;
    if (degenerate || 2ull * b + 1 >= K) {
      P = 1.0;
    } else {
      acc.add(pmf.term(b));
      acc.add(pmf.term(K - b));
      P = std::min(acc.sum, 1.0);
    }
    curve[b] = {b, static_cast<double>(b) / K, P};
  }
  return curve;
}

}  // namespace agesim
