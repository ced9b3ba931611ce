#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agesim {

// Per-bit-position '1' frequency over a set of weight words, bit 0 = LSB.
struct BitDistribution {
  std::uint32_t word_width = 0;
  std::uint64_t n_words = 0;
  std::vector<std::uint64_t> ones;  // exact per-position counts
  std::vector<double> p_one;        // ones[i] / n_words
};

BitDistribution bit_distribution(std::span<const std::uint32_t> words,
                                 std::uint32_t width);

double mean_rho(const BitDistribution& dist);

// n-weighted merge of two distributions over the same width; equals the
// distribution of the concatenated word sets.
BitDistribution merge(const BitDistribution& a, const BitDistribution& b);

}  // namespace agesim
