#include "agesim/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "agesim/errors.hpp"
#include "agesim/rng.hpp"
#include "layer_json.hpp"

namespace agesim {

namespace fs = std::filesystem;
using nlohmann::json;

LayerSpec conv_layer(std::uint32_t f, std::uint32_t ch, std::uint32_t r,
                     std::uint32_t c, std::string name) {
  require(f >= 1 && ch >= 1 && r >= 1 && c >= 1,
          "conv layer dimensions must be >= 1");
  LayerSpec s;
  s.kind = LayerKind::CONV;
  s.name = std::move(name);
  s.f = f;
  s.ch = ch;
  s.r = r;
  s.c = c;
  return s;
}

LayerSpec fc_layer(std::uint32_t out, std::uint32_t in, std::string name) {
  require(out >= 1 && in >= 1, "fc layer dimensions must be >= 1");
  LayerSpec s;
  s.kind = LayerKind::FC;
  s.name = std::move(name);
  s.f = out;
  s.ch = in;
  return s;
}

std::uint64_t NetworkSpec::total_weights() const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += l.weight_count();
  return n;
}

void NetworkSpec::validate() const {
  require(layers.size() == tensors.size(),
          "network has " + std::to_string(layers.size()) + " layers but " +
              std::to_string(tensors.size()) + " tensors");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    require(tensors[i].size() == layers[i].weight_count(),
            "layer " + std::to_string(i) + " tensor has " +
                std::to_string(tensors[i].size()) + " values, expected " +
                std::to_string(layers[i].weight_count()));
  }
}

const char* format_name(QuantFormat fmt) {
  switch (fmt) {
    case QuantFormat::FLOAT32: return "float32";
    case QuantFormat::INT8_SYM: return "int8_sym";
    case QuantFormat::INT8_ASYM: return "int8_asym";
  }
  fail("unknown quantization format");
}

QuantFormat parse_format(const std::string& name) {
  if (name == "float32") return QuantFormat::FLOAT32;
  if (name == "int8_sym") return QuantFormat::INT8_SYM;
  if (name == "int8_asym") return QuantFormat::INT8_ASYM;
  fail("unknown format '" + name + "' (expected float32|int8_sym|int8_asym)");
}

namespace {

std::vector<float> read_tensor(const fs::path& path, std::uint64_t count) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open tensor file " + path.string());
  in.seekg(0, std::ios::end);
  const std::uint64_t bytes = static_cast<std::uint64_t>(in.tellg());
  require(bytes == count * 4,
          "tensor file " + path.string() + " holds " + std::to_string(bytes) +
              " bytes, expected " + std::to_string(count * 4));
  in.seekg(0);
  std::vector<float> values(count);
  static_assert(std::endian::native == std::endian::little,
                "tensor files are little-endian");
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(bytes));
  require(in.good(), "short read on tensor file " + path.string());
  for (float v : values) {
    require(std::isfinite(v), "tensor file " + path.string() +
                                  " contains a non-finite value");
  }
  return values;
}

}  // namespace

NetworkSpec load_network(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  require(in.good(), "cannot open manifest " + manifest_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("manifest " + manifest_path + ": " + e.what());
  }

  NetworkSpec net;
  net.name = j.value("name", fs::path(manifest_path).stem().string());
  const auto& jlayers = j.at("layers");
  require(jlayers.is_array() && !jlayers.empty(),
          "manifest must declare a non-empty layer array");

  const fs::path base = fs::path(manifest_path).parent_path();
  for (std::size_t i = 0; i < jlayers.size(); ++i) {
    LayerSpec spec = detail::layer_from_json(jlayers[i], i);
    const std::string data = jlayers[i].at("data").get<std::string>();
    net.tensors.push_back(read_tensor(base / data, spec.weight_count()));
    net.layers.push_back(std::move(spec));
  }
  net.validate();
  return net;
}

NetworkSpec synthesize_network(const std::vector<LayerSpec>& layers,
                               const Distribution& dist, std::uint64_t seed,
                               std::string name) {
  require(!layers.empty(), "cannot synthesize an empty network");
  if (dist.kind == Distribution::Kind::GAUSSIAN) {
    require(dist.b > 0.0, "gaussian stddev must be > 0");
  } else {
    require(dist.a < dist.b, "uniform range must have lo < hi");
  }

  NetworkSpec net;
  net.name = std::move(name);
  net.layers = layers;
  // One derived stream per layer so a layer's values do not depend on how
  // many weights precede it.
  std::uint64_t root = seed;
  for (const auto& layer : layers) {
    const std::uint64_t layer_seed = splitmix64(root);
    std::vector<float> values(layer.weight_count());
    if (dist.kind == Distribution::Kind::GAUSSIAN) {
      GaussianSource g(layer_seed, dist.a, dist.b);
      for (auto& v : values) v = static_cast<float>(g.next());
    } else {
      Xoshiro256 rng(layer_seed);
      const double span = dist.b - dist.a;
      for (auto& v : values)
        v = static_cast<float>(dist.a + span * rng.next_double());
    }
    net.tensors.push_back(std::move(values));
  }
  return net;
}

QuantScheme fit_quantization(const NetworkSpec& net, QuantFormat fmt) {
  net.validate();
  require(!net.layers.empty(), "network has no layers");
  QuantScheme scheme;
  scheme.format = fmt;
  if (fmt == QuantFormat::FLOAT32) return scheme;

  for (const auto& tensor : net.tensors) {
    require(!tensor.empty(), "cannot fit quantization on an empty layer");
    LayerQuant q;
    if (fmt == QuantFormat::INT8_SYM) {
      float amax = 0.0f;
      for (float w : tensor) amax = std::max(amax, std::abs(w));
      q.scale = amax > 0.0f ? amax / 127.0 : 1.0;
    } else {
      auto [lo, hi] = std::minmax_element(tensor.begin(), tensor.end());
      const double mn = *lo, mx = *hi;
      q.scale = mx > mn ? (mx - mn) / 255.0 : 1.0;
      q.zero_point = static_cast<std::int32_t>(
          std::clamp<long long>(std::llround(-mn / q.scale), 0, 255));
    }
    scheme.per_layer.push_back(q);
  }
  return scheme;
}

std::uint32_t quantize_value(float w, QuantFormat fmt, const LayerQuant& q) {
  switch (fmt) {
    case QuantFormat::FLOAT32:
      return std::bit_cast<std::uint32_t>(w);
    case QuantFormat::INT8_SYM: {
      // llround rounds half away from zero
      const long long v =
          std::clamp<long long>(std::llround(w / q.scale), -127, 127);
      return static_cast<std::uint32_t>(static_cast<std::uint8_t>(v));
    }
    case QuantFormat::INT8_ASYM: {
      const long long v = std::clamp<long long>(
          std::llround(w / q.scale) + q.zero_point, 0, 255);
      return static_cast<std::uint32_t>(v);
    }
  }
  fail("unknown quantization format");
}

float dequantize_value(std::uint32_t code, QuantFormat fmt,
                       const LayerQuant& q) {
  switch (fmt) {
    case QuantFormat::FLOAT32:
      return std::bit_cast<float>(code);
    case QuantFormat::INT8_SYM: {
      const auto v = static_cast<std::int8_t>(code & 0xFF);
      return static_cast<float>(v * q.scale);
    }
    case QuantFormat::INT8_ASYM:
      return static_cast<float>(
          (static_cast<std::int32_t>(code & 0xFF) - q.zero_point) * q.scale);
  }
  fail("unknown quantization format");
}

std::vector<std::vector<std::uint32_t>> quantize_to_words(
    const NetworkSpec& net, const QuantScheme& scheme) {
  net.validate();
  if (scheme.format != QuantFormat::FLOAT32) {
    require(scheme.per_layer.size() == net.layers.size(),
            "quantization scheme was fitted on a different network");
  }
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(net.tensors.size());
  static const LayerQuant identity;
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    const LayerQuant& q = scheme.format == QuantFormat::FLOAT32
                              ? identity
                              : scheme.per_layer[i];
    std::vector<std::uint32_t> codes(net.tensors[i].size());
    for (std::size_t k = 0; k < codes.size(); ++k)
      codes[k] = quantize_value(net.tensors[i][k], scheme.format, q);
    out.push_back(std::move(codes));
  }
  return out;
}

}  // namespace agesim
