#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agesim/rng.hpp"

namespace agesim {

enum class PolicyKind { NONE, INVERSION, BARREL, TRBG };

const char* policy_name(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

struct EncodingPolicy {
  PolicyKind kind = PolicyKind::NONE;
  std::uint32_t max_shift = 7;     // BARREL: rotations cycle 0..max_shift
  double trbg_bias = 0.5;          // TRBG: P(raw bit = 1)
  std::uint32_t bias_bits = 4;     // TRBG: M, balance flag period 2^M
  bool bias_balancing = true;      // TRBG
  bool free_run = true;            // TRBG: generator keeps running while
                                   // the memory is idle between blocks
  std::uint64_t seed = 0;
};

// Control record a decoder needs to undo one write: the enable bit for
// INVERSION/TRBG, the rotation for BARREL.
struct Metadata {
  std::uint64_t seq = 0;
  std::uint32_t row = 0;
  std::uint8_t value = 0;
};

// Sequential policy state over one write stream: per-row write counters
// for INVERSION/BARREL, one global generator for TRBG.
class Encoder {
 public:
  Encoder(const EncodingPolicy& policy, std::uint32_t word_bits,
          std::uint32_t rows);

  // Encodes src into dst (same width); returns the decode record.
  Metadata encode(std::span<const std::uint64_t> src,
                  std::span<std::uint64_t> dst, std::uint32_t row);

  // One generator emission: enable = raw xor balance flag; the flag
  // toggles after every 2^M emissions when balancing is on.
  bool advance_trbg();

  // Models the free-running generator during the gap between block
  // writes: the emission counter keeps counting, so the balance flag
  // re-enters the next block at an unpredictable phase.
  void on_block_boundary();

  const EncodingPolicy& policy() const { return policy_; }
  std::uint32_t word_bits() const { return word_bits_; }

 private:
  EncodingPolicy policy_;
  std::uint32_t word_bits_;
  std::vector<std::uint64_t> row_writes_;
  Xoshiro256 raw_rng_;
  Xoshiro256 idle_rng_;
  std::uint64_t counter_ = 0;
  std::uint64_t seq_ = 0;
  bool balance_flag_ = false;
};

// decode(encode(w)) == w for every policy.
void decode(std::span<const std::uint64_t> encoded,
            std::span<std::uint64_t> dst, const EncodingPolicy& policy,
            const Metadata& meta, std::uint32_t word_bits);

}  // namespace agesim
