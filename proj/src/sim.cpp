#include "agesim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "agesim/bitword.hpp"
#include "agesim/errors.hpp"
#include "agesim/probmodel.hpp"
#include "agesim/report.hpp"
#include "agesim/rng.hpp"
#include "layer_json.hpp"

namespace agesim {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<LayerSpec> preset_layers(const std::string& name) {
  require(name == "custom_mnist", "unknown preset '" + name +
                                      "' (expected custom_mnist)");
  return {conv_layer(16, 1, 5, 5, "conv1"),
          conv_layer(50, 16, 5, 5, "conv2"), fc_layer(256, 800, "fc1"),
          fc_layer(10, 256, "fc2")};
}

Partition random_partition(const AcceleratorConfig& accel, QuantFormat fmt,
                           std::uint32_t blocks, double rho,
                           std::uint64_t seed) {
  require(blocks >= 1, "random partition needs at least one block");
  require(rho >= 0.0 && rho <= 1.0, "rho must be in [0,1]");

  Partition part;
  part.geom = accel.geometry(fmt);
  part.config = accel;
  part.format = fmt;

  std::uint64_t sm = seed;
  Xoshiro256 rng(splitmix64(sm));
  const std::uint32_t lanes = part.geom.lanes();
  const std::uint64_t top_mask = bitword::top_lane_mask(part.geom.word_bits);
  for (std::uint32_t bi = 0; bi < blocks; ++bi) {
    Block blk;
    blk.bits.assign(static_cast<std::size_t>(part.geom.rows) * lanes, 0);
    std::uint64_t* p = blk.bits.data();
    for (std::uint32_t r = 0; r < part.geom.rows; ++r) {
      for (std::uint32_t l = 0; l < lanes; ++l) {
        std::uint64_t v;
        if (rho == 0.5) {
          v = rng.next();
        } else {
          v = 0;
          for (std::uint32_t b = 0; b < 64; ++b) {
            v |= static_cast<std::uint64_t>(rng.next_bernoulli(rho)) << b;
          }
        }
        if (l + 1 == lanes) v &= top_mask;
        *p++ = v;
      }
    }
    blk.real_weights =
        static_cast<std::uint64_t>(part.geom.rows) * accel.weights_per_word();
    part.blocks.push_back(std::move(blk));
  }
  part.real_weights =
      static_cast<std::uint64_t>(blocks) * part.blocks[0].real_weights;
  part.total_fields = part.real_weights;
  return part;
}

namespace {

NetworkSpec resolve_network(const RunConfig& config) {
  const NetworkSource& src = config.network;
  switch (src.kind) {
    case NetworkSource::Kind::MANIFEST:
      return load_network(src.manifest_resolved.empty()
                              ? src.manifest
                              : src.manifest_resolved);
    case NetworkSource::Kind::SYNTHESIZE:
      return synthesize_network(src.layers, src.dist, config.seed,
                                src.name.empty() ? "synthetic" : src.name);
    case NetworkSource::Kind::PRESET:
      return synthesize_network(preset_layers(src.preset),
                                {Distribution::Kind::GAUSSIAN, 0.0, 0.1},
                                config.seed, src.preset);
    case NetworkSource::Kind::RANDOM_BITS:
      break;
  }
  fail("random-bit sources have no network to resolve");
}

}  // namespace

RunResult run(const RunConfig& config) {
  require(config.inferences >= 1, "inferences must be >= 1");
  require(config.histogram_bins >= 1, "histogram_bins must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  Partition part;
  std::string net_name;
  if (config.network.kind == NetworkSource::Kind::RANDOM_BITS) {
    part = random_partition(config.accel, config.format,
                            config.network.blocks, config.network.rho,
                            config.seed);
    net_name =
        config.network.name.empty() ? "random_bits" : config.network.name;
  } else {
    const NetworkSpec net = resolve_network(config);
    const QuantScheme scheme = fit_quantization(net, config.format);
    const auto words = quantize_to_words(net, scheme);
    part = partition_blocks(net, words, config.accel, config.format);
    net_name = net.name;
  }

  const WriteStream stream = build_write_stream(
      std::move(part), config.inferences, config.dwell_units);
  DutyCycleMap map = accumulate(stream, config.policy);
  const std::vector<double> degs = snm_of(map, config.snm);

  RunResult res;
  res.config = config;
  res.network_name = std::move(net_name);
  res.K_inf = stream.part.K_inf();
  res.K_total = static_cast<std::uint64_t>(res.K_inf) * config.inferences *
                config.dwell_units;
  res.padding_fraction = stream.part.padding_fraction();
  res.duty = summarize(map);
  res.hist = histogram(degs, config.histogram_bins, config.snm);
  res.map = std::move(map);
  res.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  if (!config.output_dir.empty()) report::emit_run(res, config.output_dir);
  return res;
}

MatrixResult run_matrix(const std::vector<RunConfig>& configs,
                        unsigned jobs) {
  require(!configs.empty(), "matrix needs at least one config");
  MatrixResult out;
  out.entries.resize(configs.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      MatrixEntry& e = out.entries[i];
      try {
        e.result = run(configs[i]);
        e.ok = true;
      } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
      }
    }
  };

  const unsigned workers = std::max(
      1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

bool CompareReport::all_within() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const CompareRow& r) { return r.within_3sigma; });
}

CompareReport compare_to_model(const DutyCycleMap& map, double rho,
                               std::optional<std::uint32_t> b) {
  require(!map.ones.empty(), "empty duty-cycle map");
  CompareReport rep;
  rep.uniform_dwell = map.uniform_dwell();
  rep.K = map.row_dwell[0];
  rep.rho = rho;
  require(rep.K >= 1, "map has zero dwell");
  if (b) require(*b <= rep.K / 2, "b must be in [0, floor(K/2)]");

  std::vector<std::uint32_t> sorted(map.ones.begin(), map.ones.end());
  std::sort(sorted.begin(), sorted.end());
  const double cells = static_cast<double>(map.cells());

  const auto empirical_at = [&](std::uint32_t bb) {
    const auto lo =
        std::upper_bound(sorted.begin(), sorted.end(), bb) - sorted.begin();
    const auto hi = sorted.end() - std::lower_bound(sorted.begin(),
                                                    sorted.end(),
                                                    rep.K - bb);
    std::int64_t overlap = 0;
    if (bb >= rep.K - bb) {  // the two tails share [K-bb, bb]
      overlap = std::upper_bound(sorted.begin(), sorted.end(), bb) -
                std::lower_bound(sorted.begin(), sorted.end(), rep.K - bb);
    }
    return static_cast<double>(lo + hi - overlap) / cells;
  };

  const auto make_row = [&](std::uint32_t bb, double predicted) {
    CompareRow r;
    r.b = bb;
    r.b_over_K = static_cast<double>(bb) / rep.K;
    r.predicted = predicted;
    r.empirical = empirical_at(bb);
    r.sigma = std::sqrt(predicted * (1.0 - predicted) / cells);
    r.within_3sigma = std::abs(r.empirical - predicted) <= 3.0 * r.sigma;
    return r;
  };

  if (b) {
    rep.rows.push_back(make_row(*b, p_duty_deviation(rep.K, rho, *b)));
  } else {
    for (const CurvePoint& p : deviation_curve(rep.K, rho)) {
      rep.rows.push_back(make_row(p.b, p.P));
    }
  }
  return rep;
}

namespace {

Distribution distribution_from_json(const json& jd) {
  Distribution d;
  const std::string kind = jd.at("kind").get<std::string>();
  if (kind == "gaussian") {
    d.kind = Distribution::Kind::GAUSSIAN;
    d.a = jd.at("mean").get<double>();
    d.b = jd.at("stddev").get<double>();
  } else if (kind == "uniform") {
    d.kind = Distribution::Kind::UNIFORM;
    d.a = jd.at("lo").get<double>();
    d.b = jd.at("hi").get<double>();
  } else {
    fail("unknown distribution '" + kind + "' (expected gaussian|uniform)");
  }
  return d;
}

json distribution_to_json(const Distribution& d) {
  if (d.kind == Distribution::Kind::GAUSSIAN) {
    return {{"kind", "gaussian"}, {"mean", d.a}, {"stddev", d.b}};
  }
  return {{"kind", "uniform"}, {"lo", d.a}, {"hi", d.b}};
}

NetworkSource network_from_json(const json& jn, const fs::path& base) {
  NetworkSource src;
  if (jn.contains("manifest")) {
    src.kind = NetworkSource::Kind::MANIFEST;
    src.manifest = jn.at("manifest").get<std::string>();
    const fs::path p(src.manifest);
    src.manifest_resolved =
        p.is_absolute() ? p.string() : (base / p).string();
  } else if (jn.contains("preset")) {
    src.kind = NetworkSource::Kind::PRESET;
    src.preset = jn.at("preset").get<std::string>();
    preset_layers(src.preset);  // validates the name
  } else if (jn.contains("synthesize")) {
    src.kind = NetworkSource::Kind::SYNTHESIZE;
    const json& js = jn.at("synthesize");
    src.name = js.value("name", "synthetic");
    src.dist = distribution_from_json(js.at("distribution"));
    const json& jl = js.at("layers");
    require(jl.is_array() && !jl.empty(),
            "synthesize needs a non-empty layer array");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      src.layers.push_back(detail::layer_from_json(jl[i], i));
    }
  } else if (jn.contains("random_bits")) {
    src.kind = NetworkSource::Kind::RANDOM_BITS;
    const json& jr = jn.at("random_bits");
    src.rho = jr.at("rho").get<double>();
    src.blocks = jr.at("blocks").get<std::uint32_t>();
  } else {
    fail("network must be one of manifest|preset|synthesize|random_bits");
  }
  return src;
}

json network_to_json(const NetworkSource& src) {
  switch (src.kind) {
    case NetworkSource::Kind::MANIFEST:
      return {{"manifest", src.manifest}};
    case NetworkSource::Kind::PRESET:
      return {{"preset", src.preset}};
    case NetworkSource::Kind::SYNTHESIZE: {
      json layers = json::array();
      for (const LayerSpec& l : src.layers) {
        layers.push_back(detail::layer_to_json(l));
      }
      return {{"synthesize",
               {{"name", src.name},
                {"distribution", distribution_to_json(src.dist)},
                {"layers", layers}}}};
    }
    case NetworkSource::Kind::RANDOM_BITS:
      return {{"random_bits", {{"rho", src.rho}, {"blocks", src.blocks}}}};
  }
  fail("unknown network source");
}

AcceleratorConfig accel_from_json(const json& ja) {
  const std::string kind = ja.at("kind").get<std::string>();
  if (kind == "baseline") {
    return baseline_config(8ull * ja.at("memory_bytes").get<std::uint64_t>(),
                           ja.value("f", 8u), ja.value("N", 8u));
  }
  if (kind == "tpu_like") {
    return tpu_config(ja.value("f", 256u), ja.value("fifo_tiles", 4u));
  }
  fail("unknown accelerator kind '" + kind +
       "' (expected baseline|tpu_like)");
}

json accel_to_json(const AcceleratorConfig& a) {
  if (a.kind == AccelKind::BASELINE) {
    return {{"kind", "baseline"},
            {"f", a.f},
            {"N", a.N},
            {"memory_bytes", a.total_bits / 8}};
  }
  return {{"kind", "tpu_like"}, {"f", a.f}, {"fifo_tiles", a.fifo_tiles}};
}

EncodingPolicy policy_from_json(const json& jp, std::uint64_t run_seed) {
  EncodingPolicy p;
  p.kind = parse_policy(jp.at("kind").get<std::string>());
  if (p.kind == PolicyKind::BARREL) {
    p.max_shift = jp.value("max_shift", 7u);
  }
  if (p.kind == PolicyKind::TRBG) {
    p.trbg_bias = jp.value("bias", 0.5);
    p.bias_bits = jp.value("bias_bits", 4u);
    p.bias_balancing = jp.value("bias_balancing", true);
    p.free_run = jp.value("free_run", true);
    if (jp.contains("seed")) {
      p.seed = jp.at("seed").get<std::uint64_t>();
    } else {
      std::uint64_t sm = run_seed;
      splitmix64(sm);  // keep the generator stream apart from the run's
      p.seed = splitmix64(sm);
    }
  }
  return p;
}

json policy_to_json(const EncodingPolicy& p) {
  json j = {{"kind", policy_name(p.kind)}};
  if (p.kind == PolicyKind::BARREL) j["max_shift"] = p.max_shift;
  if (p.kind == PolicyKind::TRBG) {
    j["bias"] = p.trbg_bias;
    j["bias_bits"] = p.bias_bits;
    j["bias_balancing"] = p.bias_balancing;
    j["free_run"] = p.free_run;
    j["seed"] = p.seed;
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text,
                           const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("run config: ") + e.what());
  }
  const fs::path base(base_dir);

  RunConfig cfg;
  cfg.network = network_from_json(j.at("network"), base);
  cfg.format = parse_format(j.value("format", "int8_sym"));
  cfg.accel = accel_from_json(j.at("accelerator"));
  cfg.seed = j.value("seed", 1ull);
  cfg.policy = policy_from_json(j.at("policy"), cfg.seed);
  cfg.inferences = j.value("inferences", 100u);
  cfg.histogram_bins = j.value("histogram_bins", 32u);
  cfg.dwell_units = j.value("dwell_units", 1u);
  cfg.output_dir = j.value("output_dir", std::string());
  cfg.dump_duty_map = j.value("dump_duty_map", false);
  if (j.contains("snm")) {
    const json& js = j.at("snm");
    if (js.contains("curve_csv") && !js.at("curve_csv").is_null()) {
      cfg.snm_curve_csv = js.at("curve_csv").get<std::string>();
      const fs::path p(cfg.snm_curve_csv);
      cfg.snm = load_snm_curve(
          p.is_absolute() ? p.string() : (base / p).string());
    } else {
      cfg.snm.best = js.value("best", 10.82);
      cfg.snm.worst = js.value("worst", 26.12);
      require(cfg.snm.best < cfg.snm.worst,
              "snm best must be below worst");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open run config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse_run_config(text, fs::path(path).parent_path().string());
  } catch (const Error& e) {
    fail(path + ": " + e.what());
  }
}

std::string config_json(const RunConfig& config) {
  json j;
  j["network"] = network_to_json(config.network);
  j["format"] = format_name(config.format);
  j["accelerator"] = accel_to_json(config.accel);
  j["policy"] = policy_to_json(config.policy);
  j["inferences"] = config.inferences;
  j["seed"] = config.seed;
  j["histogram_bins"] = config.histogram_bins;
  j["dwell_units"] = config.dwell_units;
  json snm = {{"best", config.snm.best}, {"worst", config.snm.worst}};
  snm["curve_csv"] =
      config.snm_curve_csv.empty() ? json(nullptr) : json(config.snm_curve_csv);
  j["snm"] = snm;
  return j.dump();
}

}  // namespace agesim
