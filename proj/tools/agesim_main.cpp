#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agesim/bitstats.hpp"
#include "agesim/errors.hpp"
#include "agesim/probmodel.hpp"
#include "agesim/report.hpp"
#include "agesim/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void print_error(const std::string& message) {
  std::cerr << json{{"error", message}}.dump() << "\n";
}

void print_run_summary(const agesim::RunResult& r) {
  std::cout << "network: " << r.network_name << "\n"
            << "format: " << agesim::format_name(r.config.format) << "\n"
            << "policy: " << agesim::policy_name(r.config.policy.kind)
            << "\n"
            << "k_inf: " << r.K_inf << "\n"
            << "k_total: " << r.K_total << "\n"
            << "padding_fraction: "
            << agesim::report::format_double(r.padding_fraction) << "\n"
            << "duty_mean: " << agesim::report::format_double(r.duty.mean)
            << "\n"
            << "mean_abs_dev: "
            << agesim::report::format_double(r.duty.mean_abs_dev) << "\n"
            << "pct_best_bin: "
            << agesim::report::format_double(r.hist.pct.front()) << "\n"
            << "pct_worst_bin: "
            << agesim::report::format_double(r.hist.pct.back()) << "\n"
            << "wall_ms: " << agesim::report::format_double(r.wall_ms)
            << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            bool dump_map) {
  agesim::RunConfig cfg = agesim::load_run_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (dump_map) cfg.dump_duty_map = true;
  const agesim::RunResult result = agesim::run(cfg);
  print_run_summary(result);
  if (!cfg.output_dir.empty()) {
    std::cout << "output_dir: " << cfg.output_dir << "\n";
  }
  return 0;
}

int cmd_matrix(const std::string& config_dir, const std::string& out_dir,
               unsigned jobs) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  agesim::require(!paths.empty(),
                  "no .json configs found in " + config_dir);

  std::vector<agesim::RunConfig> configs;
  configs.reserve(paths.size());
  for (const auto& p : paths) configs.push_back(agesim::load_run_config(p));

  const agesim::MatrixResult matrix = agesim::run_matrix(configs, jobs);
  for (const auto& f : agesim::report::emit_matrix(matrix, out_dir)) {
    std::cout << f << "\n";
  }
  int failures = 0;
  for (std::size_t i = 0; i < matrix.entries.size(); ++i) {
    if (!matrix.entries[i].ok) {
      ++failures;
      std::cerr << json{{"error", matrix.entries[i].error},
                        {"config", paths[i]}}
                       .dump()
                << "\n";
    }
  }
  return failures == 0 ? 0 : 3;
}

int cmd_bits(const std::string& manifest, const std::string& format,
             const std::string& out_path) {
  const agesim::NetworkSpec net = agesim::load_network(manifest);
  const agesim::QuantFormat fmt = agesim::parse_format(format);
  const agesim::QuantScheme scheme = agesim::fit_quantization(net, fmt);
  const auto words = agesim::quantize_to_words(net, scheme);

  std::vector<std::uint32_t> all;
  all.reserve(net.total_weights());
  for (const auto& layer : words) {
    all.insert(all.end(), layer.begin(), layer.end());
  }
  const agesim::BitDistribution dist =
      agesim::bit_distribution(all, agesim::bits_per_weight(fmt));
  const std::string csv = agesim::report::bits_csv(dist);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    agesim::report::write_text_atomic(out_path, csv);
    std::cout << out_path << "\n";
  }
  return 0;
}

int cmd_prob(std::uint32_t K, double rho, std::uint32_t b,
             std::optional<std::uint64_t> cells,
             std::optional<std::uint64_t> n, const std::string& curve_path) {
  json out;
  out["K"] = K;
  out["rho"] = rho;
  out["b"] = b;
  out["p_duty_deviation"] = agesim::p_duty_deviation(K, rho, b);
  if (cells && n) {
    out["cells"] = *cells;
    out["n"] = *n;
    out["p_at_least_n"] = agesim::p_at_least_n(K, rho, b, *cells, *n);
  } else {
    agesim::require(!cells && !n, "--cells and --n must be given together");
  }
  if (!curve_path.empty()) {
    const auto curve = agesim::deviation_curve(K, rho);
    agesim::report::write_text_atomic(curve_path,
                                      agesim::report::curve_csv(curve));
    out["curve_csv"] = curve_path;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_compare(const std::string& run_dir, double rho,
                std::optional<std::uint32_t> b, const std::string& out_path) {
  const agesim::DutyCycleMap map = agesim::report::load_duty_map(run_dir);
  const agesim::CompareReport rep = agesim::compare_to_model(map, rho, b);
  const std::string csv = agesim::report::compare_csv(rep);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    agesim::report::write_text_atomic(out_path, csv);
    std::cout << out_path << "\n";
  }
  if (!rep.uniform_dwell) {
    std::cerr << json{{"warning", "non-uniform dwell; comparison uses "
                                  "row 0's write count"}}
                     .dump()
              << "\n";
  }
  if (!rep.all_within()) {
    std::cerr << json{{"warning",
                       "empirical fraction outside the 3-sigma band for "
                       "at least one b"}}
                     .dump()
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SRAM weight-memory aging simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", agesim::report::kToolVersion);

  auto* run_cmd = app.add_subcommand(
      "run", "Run one simulation from a JSON config");
  std::string run_config, run_out;
  bool run_dump = false;
  run_cmd->add_option("config", run_config, "run config JSON file")
      ->required();
  run_cmd->add_option("--output-dir", run_out,
                      "emit report files here (overrides the config)");
  run_cmd->add_flag("--dump-duty-map", run_dump,
                    "also emit the per-cell counter dump");

  auto* matrix_cmd = app.add_subcommand(
      "matrix", "Run every config in a directory and combine the results");
  std::string matrix_dir, matrix_out = "matrix_out";
  unsigned matrix_jobs = 1;
  matrix_cmd->add_option("config-dir", matrix_dir, "directory of *.json")
      ->required();
  matrix_cmd->add_option("--out", matrix_out, "combined report directory");
  matrix_cmd->add_option("--jobs", matrix_jobs, "parallel runs");

  auto* bits_cmd = app.add_subcommand(
      "bits", "Per-bit-position '1' probability of a network's words");
  std::string bits_manifest, bits_format, bits_out;
  bits_cmd->add_option("manifest", bits_manifest, "network manifest JSON")
      ->required();
  bits_cmd->add_option("--format", bits_format,
                       "float32|int8_sym|int8_asym")
      ->required();
  bits_cmd->add_option("--out", bits_out, "write CSV here (default stdout)");

  auto* prob_cmd = app.add_subcommand(
      "prob", "Closed-form duty-cycle deviation probabilities");
  std::uint32_t prob_K = 0, prob_b = 0;
  double prob_rho = 0.5;
  std::optional<std::uint64_t> prob_cells, prob_n;
  std::string prob_curve;
  prob_cmd->add_option("--K", prob_K, "writes per cell")->required();
  prob_cmd->add_option("--rho", prob_rho, "P(bit = 1)")->required();
  prob_cmd->add_option("--b", prob_b, "deviation threshold")->required();
  prob_cmd->add_option("--cells", prob_cells, "cell count for the tail");
  prob_cmd->add_option("--n", prob_n, "at-least-n cell threshold");
  prob_cmd->add_option("--curve", prob_curve, "write the full curve CSV");

  auto* compare_cmd = app.add_subcommand(
      "compare", "Check an emitted duty map against the closed-form model");
  std::string compare_dir, compare_out;
  double compare_rho = 0.5;
  std::optional<std::uint32_t> compare_b;
  compare_cmd
      ->add_option("run-dir", compare_dir,
                   "run output directory (needs duty_map.bin)")
      ->required();
  compare_cmd->add_option("--rho", compare_rho, "P(bit = 1) of the source")
      ->required();
  compare_cmd->add_option("--b", compare_b,
                          "single threshold (default: full sweep)");
  compare_cmd->add_option("--out", compare_out,
                          "write CSV here (default stdout)");

  try {
    app.parse(argc, argv);
    if (*run_cmd) return cmd_run(run_config, run_out, run_dump);
    if (*matrix_cmd) return cmd_matrix(matrix_dir, matrix_out, matrix_jobs);
    if (*bits_cmd) return cmd_bits(bits_manifest, bits_format, bits_out);
    if (*prob_cmd) {
      return cmd_prob(prob_K, prob_rho, prob_b, prob_cells, prob_n,
                      prob_curve);
    }
    if (*compare_cmd) {
      return cmd_compare(compare_dir, compare_rho, compare_b, compare_out);
    }
    print_error("no subcommand selected");
    return 2;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
}
