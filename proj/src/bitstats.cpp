#include "agesim/bitstats.hpp"

#include "agesim/errors.hpp"

namespace agesim {

BitDistribution bit_distribution(std::span<const std::uint32_t> words,
                                 std::uint32_t width) {
  require(!words.empty(), "bit distribution needs at least one word");
  require(width >= 1 && width <= 32, "word width must be in [1,32]");

  BitDistribution d;
  d.word_width = width;
  d.n_words = words.size();
  d.ones.assign(width, 0);
  for (std::uint32_t w : words) {
    for (std::uint32_t i = 0; i < width; ++i) d.ones[i] += (w >> i) & 1u;
  }
  d.p_one.resize(width);
  for (std::uint32_t i = 0; i < width; ++i)
    d.p_one[i] = static_cast<double>(d.ones[i]) / static_cast<double>(d.n_words);
  return d;
}

double mean_rho(const BitDistribution& dist) {
  require(dist.word_width > 0, "empty distribution");
  double sum = 0.0;
  for (double p : dist.p_one) sum += p;
  return sum / dist.word_width;
}

BitDistribution merge(const BitDistribution& a, const BitDistribution& b) {
  require(a.word_width == b.word_width, "cannot merge distributions of "
                                        "different word widths");
  BitDistribution d;
  d.word_width = a.word_width;
  d.n_words = a.n_words + b.n_words;
  d.ones.resize(a.word_width);
  d.p_one.resize(a.word_width);
  for (std::uint32_t i = 0; i < a.word_width; ++i) {
    d.ones[i] = a.ones[i] + b.ones[i];
    d.p_one[i] = static_cast<double>(d.ones[i]) / static_cast<double>(d.n_words);
  }
  return d;
}

}  // namespace agesim
