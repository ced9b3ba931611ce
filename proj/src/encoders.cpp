#include "agesim/encoders.hpp"

#include "agesim/bitword.hpp"
#include "agesim/errors.hpp"

namespace agesim {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::NONE: return "none";
    case PolicyKind::INVERSION: return "inversion";
    case PolicyKind::BARREL: return "barrel";
    case PolicyKind::TRBG: return "trbg";
  }
  fail("unknown policy kind");
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "none") return PolicyKind::NONE;
  if (name == "inversion") return PolicyKind::INVERSION;
  if (name == "barrel") return PolicyKind::BARREL;
  if (name == "trbg") return PolicyKind::TRBG;
  fail("unknown policy '" + name + "' (expected none|inversion|barrel|trbg)");
}

namespace {

std::uint64_t derive(std::uint64_t seed) { return splitmix64(seed); }

void copy_word(std::span<const std::uint64_t> src,
               std::span<std::uint64_t> dst, std::uint32_t width) {
  const std::uint32_t n = bitword::lanes_for(width);
  for (std::uint32_t i = 0; i < n; ++i) dst[i] = src[i];
}

void invert_word(std::span<const std::uint64_t> src,
                 std::span<std::uint64_t> dst, std::uint32_t width) {
  const std::uint32_t n = bitword::lanes_for(width);
  for (std::uint32_t i = 0; i < n; ++i) dst[i] = ~src[i];
  dst[n - 1] &= bitword::top_lane_mask(width);
}

}  // namespace

Encoder::Encoder(const EncodingPolicy& policy, std::uint32_t word_bits,
                 std::uint32_t rows)
    : policy_(policy),
      word_bits_(word_bits),
      raw_rng_(derive(policy.seed)),
      idle_rng_(derive(~policy.seed)) {
  require(word_bits >= 1, "word width must be >= 1");
  require(rows >= 1, "row count must be >= 1");
  if (policy.kind == PolicyKind::BARREL) {
    require(policy.max_shift < word_bits,
            "barrel max_shift must be below the word width");
  }
  if (policy.kind == PolicyKind::TRBG) {
    require(policy.trbg_bias >= 0.0 && policy.trbg_bias <= 1.0,
            "trbg bias must be in [0,1]");
    require(policy.bias_bits >= 1 && policy.bias_bits <= 32,
            "trbg bias register width must be in [1,32]");
  }
  if (policy.kind == PolicyKind::INVERSION ||
      policy.kind == PolicyKind::BARREL) {
    row_writes_.assign(rows, 0);
  }
}

Metadata Encoder::encode(std::span<const std::uint64_t> src,
                         std::span<std::uint64_t> dst, std::uint32_t row) {
  Metadata meta;
  meta.seq = seq_++;
  meta.row = row;
  switch (policy_.kind) {
    case PolicyKind::NONE:
      copy_word(src, dst, word_bits_);
      break;
    case PolicyKind::INVERSION: {
      const bool flip = row_writes_[row]++ & 1;  // every other write
      meta.value = flip ? 1 : 0;
      if (flip) invert_word(src, dst, word_bits_);
      else copy_word(src, dst, word_bits_);
      break;
    }
    case PolicyKind::BARREL: {
      const std::uint32_t s = static_cast<std::uint32_t>(
          row_writes_[row]++ % (policy_.max_shift + 1ull));
      meta.value = static_cast<std::uint8_t>(s);
      bitword::rotl(src, dst, word_bits_, s);
      break;
    }
    case PolicyKind::TRBG: {
      const bool enable = advance_trbg();
      meta.value = enable ? 1 : 0;
      if (enable) invert_word(src, dst, word_bits_);
      else copy_word(src, dst, word_bits_);
      break;
    }
  }
  return meta;
}

bool Encoder::advance_trbg() {
  const bool raw = raw_rng_.next_bernoulli(policy_.trbg_bias);
  const bool enable = policy_.bias_balancing ? raw != balance_flag_ : raw;
  ++counter_;
  if (policy_.bias_balancing &&
      counter_ % (1ull << policy_.bias_bits) == 0) {
    balance_flag_ = !balance_flag_;
  }
  return enable;
}

void Encoder::on_block_boundary() {
  if (policy_.kind != PolicyKind::TRBG || !policy_.free_run ||
      !policy_.bias_balancing) {
    return;
  }
  // Idle emissions only move the counter and flag; the raw bits they
  // would have produced are never sampled by a write.
  const std::uint64_t period = 1ull << policy_.bias_bits;
  const std::uint64_t k = idle_rng_.next_below(2 * period);
  const std::uint64_t toggles = (counter_ % period + k) / period;
  counter_ += k;
  if (toggles & 1) balance_flag_ = !balance_flag_;
}

void decode(std::span<const std::uint64_t> encoded,
            std::span<std::uint64_t> dst, const EncodingPolicy& policy,
            const Metadata& meta, std::uint32_t word_bits) {
  switch (policy.kind) {
    case PolicyKind::NONE:
      copy_word(encoded, dst, word_bits);
      break;
    case PolicyKind::INVERSION:
    case PolicyKind::TRBG:
      if (meta.value) invert_word(encoded, dst, word_bits);
      else copy_word(encoded, dst, word_bits);
      break;
    case PolicyKind::BARREL:
      bitword::rotr(encoded, dst, word_bits, meta.value);
      break;
  }
}

}  // namespace agesim
