#include "agesim/bitword.hpp"

#include <bit>

namespace agesim::bitword {

void rotl(std::span<const std::uint64_t> src, std::span<std::uint64_t> dst,
          std::uint32_t width_bits, std::uint32_t shift) {
  const std::uint32_t n = lanes_for(width_bits);
  shift %= width_bits;
  for (std::uint32_t i = 0; i < n; ++i) dst[i] = 0;
  if (shift == 0) {
    for (std::uint32_t i = 0; i < n; ++i) dst[i] = src[i];
    return;
  }
  // Shift whole lanes first, then fix up the split at the word boundary.
  // Widths are not generally lane-aligned, so do it bit-by-bit per lane
  // group: cheap enough (words are <= a few thousand bits, rotations are
  // once per row write on an already O(bits) path).
  const std::uint32_t lane_shift = shift >> 6;
  const std::uint32_t bit_shift = shift & 63u;
  if (width_bits % 64u == 0) {
    // lane-aligned width: classic double-word funnel shift
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint64_t lo = src[(i + n - lane_shift) % n];
      const std::uint64_t hi = src[(i + 2 * n - lane_shift - 1) % n];
      dst[i] = bit_shift == 0 ? lo : (lo << bit_shift) | (hi >> (64 - bit_shift));
    }
    return;
  }
  for (std::uint32_t i = 0; i < width_bits; ++i) {
    if (get_bit(src, i)) set_bit(dst, (i + shift) % width_bits);
  }
}

std::uint64_t popcount(std::span<const std::uint64_t> w,
                       std::uint32_t width_bits) {
  const std::uint32_t n = lanes_for(width_bits);
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < n; ++i) total += std::popcount(w[i]);
  return total;
}

}  // namespace agesim::bitword
