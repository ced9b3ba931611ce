#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agesim {

enum class LayerKind { CONV, FC };

// FC(out, in) is stored as f=out, ch=in, r=c=1 so the dataflow can treat
// every layer as "f filters of ch*r*c weights each".
struct LayerSpec {
  LayerKind kind = LayerKind::FC;
  std::string name;
  std::uint32_t f = 1;   // CONV filters / FC output neurons
  std::uint32_t ch = 1;  // CONV input channels / FC input size
  std::uint32_t r = 1;   // kernel height (1 for FC)
  std::uint32_t c = 1;   // kernel width (1 for FC)

  std::uint64_t per_filter() const {
    return static_cast<std::uint64_t>(ch) * r * c;
  }
  std::uint64_t weight_count() const { return f * per_filter(); }
};

LayerSpec conv_layer(std::uint32_t f, std::uint32_t ch, std::uint32_t r,
                     std::uint32_t c, std::string name = "");
LayerSpec fc_layer(std::uint32_t out, std::uint32_t in, std::string name = "");

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  // One flat tensor per layer, row-major (filter, channel, row, col) for
  // CONV and (out, in) for FC.
  std::vector<std::vector<float>> tensors;

  std::uint64_t total_weights() const;
  void validate() const;
};

enum class QuantFormat { FLOAT32, INT8_SYM, INT8_ASYM };

const char* format_name(QuantFormat fmt);
QuantFormat parse_format(const std::string& name);

inline std::uint32_t bits_per_weight(QuantFormat fmt) {
  return fmt == QuantFormat::FLOAT32 ? 32u : 8u;
}

struct LayerQuant {
  double scale = 1.0;
  std::int32_t zero_point = 0;  // INT8_ASYM only
};

struct QuantScheme {
  QuantFormat format = QuantFormat::FLOAT32;
  std::vector<LayerQuant> per_layer;  // empty for FLOAT32

  std::uint32_t bits() const { return bits_per_weight(format); }
};

struct Distribution {
  enum class Kind { GAUSSIAN, UNIFORM } kind = Kind::GAUSSIAN;
  double a = 0.0;  // mean / lo
  double b = 1.0;  // stddev / hi
};

// Manifest: JSON file naming the network and its layers, each layer
// pointing at a raw little-endian float32 tensor file (path relative to
// the manifest).
NetworkSpec load_network(const std::string& manifest_path);

NetworkSpec synthesize_network(const std::vector<LayerSpec>& layers,
                               const Distribution& dist, std::uint64_t seed,
                               std::string name = "synthetic");

QuantScheme fit_quantization(const NetworkSpec& net, QuantFormat fmt);

// Bit pattern of one weight in the low bits: IEEE-754 binary32 for
// FLOAT32, 8-bit two's complement in [-127,127] for INT8_SYM, unsigned
// [0,255] for INT8_ASYM.
std::uint32_t quantize_value(float w, QuantFormat fmt, const LayerQuant& q);

// Inverse of quantize_value; used by round-trip checks.
float dequantize_value(std::uint32_t code, QuantFormat fmt,
                       const LayerQuant& q);

// Per-layer arrays of weight bit patterns, network order preserved.
std::vector<std::vector<std::uint32_t>> quantize_to_words(
    const NetworkSpec& net, const QuantScheme& scheme);

}  // namespace agesim
