#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agesim/aging.hpp"
#include "agesim/bitstats.hpp"
#include "agesim/probmodel.hpp"
#include "agesim/sim.hpp"

namespace agesim::report {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest decimal that round-trips to the same double; keeps CSV and
// golden files stable across platforms.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view data);
std::string config_hash_hex(const RunConfig& config);

// temp + rename so readers never see a partial file
void write_text_atomic(const std::string& path, const std::string& content);

// The summary.json content for a result (trailing newline included).
std::string summary_json(const RunResult& result);

// summary.json + histogram.csv (+ duty_map.bin when the config asks);
// returns the paths written. Identical results emit identical bytes.
std::vector<std::string> emit_run(const RunResult& result,
                                  const std::string& out_dir);

// matrix.csv (one row per successful run) + matrix.json (every entry)
std::vector<std::string> emit_matrix(const MatrixResult& matrix,
                                     const std::string& out_dir);

// columns: bit_index, p_one
std::string bits_csv(const BitDistribution& dist);

// columns: b, b_over_K, P
std::string curve_csv(std::span<const CurvePoint> curve);

// columns: b, b_over_K, predicted, empirical, sigma, within_3sigma
std::string compare_csv(const CompareReport& report);

// columns: bin_lo, bin_hi, count, pct
std::string histogram_csv(const SnmHistogram& hist);

// Reloads a duty-cycle map emitted by emit_run (summary.json +
// duty_map.bin) for offline comparison.
DutyCycleMap load_duty_map(const std::string& run_dir);

}  // namespace agesim::report
