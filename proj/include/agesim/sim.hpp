#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agesim/aging.hpp"
#include "agesim/dataflow.hpp"
#include "agesim/encoders.hpp"
#include "agesim/weights.hpp"

namespace agesim {

struct NetworkSource {
  enum class Kind { MANIFEST, SYNTHESIZE, PRESET, RANDOM_BITS };
  Kind kind = Kind::PRESET;
  std::string manifest;           // path as written in the config
  std::string manifest_resolved;  // absolute; not echoed or hashed
  std::string preset = "custom_mnist";
  std::string name;               // SYNTHESIZE display name
  std::vector<LayerSpec> layers;  // SYNTHESIZE
  Distribution dist;              // SYNTHESIZE
  double rho = 0.5;               // RANDOM_BITS: P(bit = 1)
  std::uint32_t blocks = 1;       // RANDOM_BITS: blocks per inference
};

struct RunConfig {
  NetworkSource network;
  QuantFormat format = QuantFormat::INT8_SYM;
  AcceleratorConfig accel;
  EncodingPolicy policy;
  std::uint32_t inferences = 100;
  std::uint64_t seed = 1;
  SnmModel snm;
  std::string snm_curve_csv;  // as written; empty = built-in linear curve
  std::uint32_t histogram_bins = 32;
  std::uint32_t dwell_units = 1;
  std::string output_dir;  // empty = no files emitted
  bool dump_duty_map = false;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& base_dir);

// Canonical sorted-key JSON echo of everything that affects the numbers
// (output location and dump switches excluded); hashed into the report.
std::string config_json(const RunConfig& config);

struct RunResult {
  RunConfig config;
  std::string network_name;
  std::uint32_t K_inf = 0;
  std::uint64_t K_total = 0;  // writes per cell over the whole run
  double padding_fraction = 0.0;
  DutySummary duty;
  SnmHistogram hist;
  DutyCycleMap map;
  double wall_ms = 0.0;  // in-memory only; never serialized
};

RunResult run(const RunConfig& config);

struct MatrixEntry {
  bool ok = false;
  std::string error;
  std::optional<RunResult> result;
};

struct MatrixResult {
  std::vector<MatrixEntry> entries;  // input order
};

// Independent runs; failures land in their entry without stopping the
// rest. jobs > 1 shards whole runs across threads.
MatrixResult run_matrix(const std::vector<RunConfig>& configs,
                        unsigned jobs = 1);

struct CompareRow {
  std::uint32_t b = 0;
  double b_over_K = 0.0;
  double predicted = 0.0;
  double empirical = 0.0;
  double sigma = 0.0;  // binomial sd of the empirical fraction
  bool within_3sigma = false;
};

struct CompareReport {
  std::uint32_t K = 0;
  double rho = 0.5;
  bool uniform_dwell = true;
  bool uniform_source = true;  // caller knows the word source
  std::vector<CompareRow> rows;

  bool all_within() const;
};

// Empirical duty-deviation fractions against the closed-form model, one
// row per b (or the full sweep when b is absent).
CompareReport compare_to_model(const DutyCycleMap& map, double rho,
                               std::optional<std::uint32_t> b = {});

// CONV(16,1,5,5) -> CONV(50,16,5,5) -> FC(256,800) -> FC(10,256)
std::vector<LayerSpec> preset_layers(const std::string& name);

// K_inf blocks of i.i.d. Bernoulli(rho) bits filling the configured
// geometry; the direct word source for model cross-checks.
Partition random_partition(const AcceleratorConfig& accel, QuantFormat fmt,
                           std::uint32_t blocks, double rho,
                           std::uint64_t seed);

}  // namespace agesim
