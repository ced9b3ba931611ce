#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agesim/dataflow.hpp"
#include "agesim/encoders.hpp"

namespace agesim {

// Exact per-cell write statistics: cell (row, bit) is ones[row*word_bits
// + bit]; every cell in a row shares the row's total dwell.
struct DutyCycleMap {
  MemoryGeometry geom;
  std::vector<std::uint32_t> ones;
  std::vector<std::uint32_t> row_dwell;

  std::uint64_t cells() const { return geom.cells(); }
  double duty(std::uint64_t cell) const {
    return static_cast<double>(ones[cell]) /
           static_cast<double>(row_dwell[cell / geom.word_bits]);
  }
  // Fraction of cells whose ones-count is <= b or >= dwell - b, i.e.
  // duty-cycle at least b/K away from the nearer extreme of 0.5.
  double deviation_fraction(std::uint32_t b) const;
  bool uniform_dwell() const;
};

// Applies the encoding policy to the write stream and counts, exactly,
// how often each cell held a '1'. Deterministic policies are simulated
// for one period of the per-row state and scaled; TRBG runs in full.
DutyCycleMap accumulate(const WriteStream& stream,
                        const EncodingPolicy& policy);

// 7-year SNM degradation as a function of duty-cycle. Default curve is
// linear in the imbalance |2d-1| between the two endpoints; a measured
// device curve can be swapped in as a piecewise-linear table.
struct SnmModel {
  double best = 10.82;   // percent, at duty-cycle 0.5
  double worst = 26.12;  // percent, at duty-cycle 0 and 1
  std::vector<std::pair<double, double>> curve;  // optional (d, deg) table

  double deg(double duty) const;
};

// CSV rows "duty,degradation_pct", duty covering 0.0 through 1.0.
SnmModel load_snm_curve(const std::string& path);

std::vector<double> snm_of(const DutyCycleMap& map, const SnmModel& model);

struct SnmHistogram {
  double lo = 0.0;  // model.best
  double hi = 0.0;  // model.worst
  std::vector<std::uint64_t> counts;  // half-open bins, last closed
  std::vector<double> pct;
  std::uint64_t exact_best = 0;   // cells exactly at lo
  std::uint64_t exact_worst = 0;  // cells exactly at hi
  std::uint64_t total = 0;
};

SnmHistogram histogram(std::span<const double> degradations,
                       std::uint32_t bins, const SnmModel& model);

struct DutySummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double frac_within_005 = 0.0;  // |d - 0.5| <= 0.05
  double mean_abs_dev = 0.0;     // mean |d - 0.5|
};

DutySummary summarize(const DutyCycleMap& map);

// Standard error of mean_abs_dev estimated over per-row means; rows are
// the independent unit under row-granular encoding decisions.
double mean_abs_dev_sigma(const DutyCycleMap& map);

}  // namespace agesim
