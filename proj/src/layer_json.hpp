#pragma once

#include <json.hpp>

#include "agesim/errors.hpp"
#include "agesim/weights.hpp"

namespace agesim::detail {

inline LayerSpec layer_from_json(const nlohmann::json& jl,
                                 std::size_t index) {
  require(jl.is_object(),
          "layer entry " + std::to_string(index) + " is not an object");
  const std::string kind = jl.at("kind").get<std::string>();
  std::string name = jl.value("name", "layer" + std::to_string(index));
  if (kind == "conv") {
    return conv_layer(jl.at("filters").get<std::uint32_t>(),
                      jl.at("channels").get<std::uint32_t>(),
                      jl.at("kernel_h").get<std::uint32_t>(),
                      jl.at("kernel_w").get<std::uint32_t>(), std::move(name));
  }
  if (kind == "fc") {
    return fc_layer(jl.at("out").get<std::uint32_t>(),
                    jl.at("in").get<std::uint32_t>(), std::move(name));
  }
  fail("layer " + std::to_string(index) + ": unknown kind '" + kind +
       "' (expected conv|fc)");
}

inline nlohmann::json layer_to_json(const LayerSpec& l) {
  nlohmann::json j;
  if (l.kind == LayerKind::CONV) {
    j = {{"kind", "conv"},
         {"filters", l.f},
         {"channels", l.ch},
         {"kernel_h", l.r},
         {"kernel_w", l.c}};
  } else {
    j = {{"kind", "fc"}, {"out", l.f}, {"in", l.ch}};
  }
  if (!l.name.empty()) j["name"] = l.name;
  return j;
}

}  // namespace agesim::detail
