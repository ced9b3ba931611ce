#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agesim::bitword {

// Memory words are wide (f*N*bits_per_weight, e.g. 512 or 2048 bits) and are
// stored LSB-first across 64-bit lanes: bit i lives in lane i/64 at position
// i%64. All helpers keep bits >= width cleared.

inline std::uint32_t lanes_for(std::uint32_t width_bits) {
  return (width_bits + 63u) / 64u;
}

// mask for the last (possibly partial) lane
inline std::uint64_t top_lane_mask(std::uint32_t width_bits) {
  const std::uint32_t rem = width_bits % 64u;
  return rem == 0 ? ~0ull : ((1ull << rem) - 1ull);
}

inline bool get_bit(std::span<const std::uint64_t> w, std::uint32_t i) {
  return (w[i >> 6] >> (i & 63u)) & 1ull;
}

inline void set_bit(std::span<std::uint64_t> w, std::uint32_t i) {
  w[i >> 6] |= 1ull << (i & 63u);
}

// Writes the low `nbits` of `value` at bit offset `off`. Callers align
// offsets to the field width (8 or 32), so fields never straddle lanes.
inline void store_field(std::span<std::uint64_t> w, std::uint32_t off,
                        std::uint32_t nbits, std::uint32_t value) {
  const std::uint64_t mask = nbits >= 64 ? ~0ull : ((1ull << nbits) - 1ull);
  w[off >> 6] |= (static_cast<std::uint64_t>(value) & mask)
                 << (off & 63u);
}

inline std::uint32_t load_field(std::span<const std::uint64_t> w,
                                std::uint32_t off, std::uint32_t nbits) {
  const std::uint64_t mask = nbits >= 64 ? ~0ull : ((1ull << nbits) - 1ull);
  return static_cast<std::uint32_t>((w[off >> 6] >> (off & 63u)) & mask);
}

inline void invert(std::span<std::uint64_t> w, std::uint32_t width_bits) {
  const std::uint32_t n = lanes_for(width_bits);
  for (std::uint32_t i = 0; i < n; ++i) w[i] = ~w[i];
  w[n - 1] &= top_lane_mask(width_bits);
}

// rotate-left: output bit (i+s) mod width = input bit i
void rotl(std::span<const std::uint64_t> src, std::span<std::uint64_t> dst,
          std::uint32_t width_bits, std::uint32_t shift);

inline void rotr(std::span<const std::uint64_t> src,
                 std::span<std::uint64_t> dst, std::uint32_t width_bits,
                 std::uint32_t shift) {
  rotl(src, dst, width_bits, (width_bits - shift % width_bits) % width_bits);
}

std::uint64_t popcount(std::span<const std::uint64_t> w,
                       std::uint32_t width_bits);

}  // namespace agesim::bitword
