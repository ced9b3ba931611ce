#pragma once

#include <cmath>
#include <cstdint>

namespace agesim {

// Deterministic, platform-independent generators. std::mt19937 would be
// reproducible too, but the std distributions are not pinned across
// implementations, and report determinism is a hard requirement.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1) with 53 random bits
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // [0, n)
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  bool next_bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_double() < p;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Box-Muller, one value per call; pairs are generated eagerly so the
// stream position only depends on the number of calls.
class GaussianSource {
public:
  GaussianSource(std::uint64_t seed, double mean, double stddev)
      : rng_(seed), mean_(mean), stddev_(stddev) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return mean_ + stddev_ * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = rng_.next_double();
    } while (u1 <= 0.0);
    const double u2 = rng_.next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean_ + stddev_ * r * std::cos(theta);
  }

private:
  Xoshiro256 rng_;
  double mean_;
  double stddev_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace agesim
