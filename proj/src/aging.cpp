#include "agesim/aging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "agesim/errors.hpp"

namespace agesim {

double DutyCycleMap::deviation_fraction(std::uint32_t b) const {
  require(!ones.empty(), "empty duty-cycle map");
  std::uint64_t hits = 0;
  for (std::uint32_t r = 0; r < geom.rows; ++r) {
    const std::uint32_t T = row_dwell[r];
    require(b <= T / 2, "b exceeds floor(dwell/2)");
    const std::uint32_t* cell =
        ones.data() + static_cast<std::uint64_t>(r) * geom.word_bits;
    for (std::uint32_t i = 0; i < geom.word_bits; ++i) {
      hits += cell[i] <= b || cell[i] >= T - b;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(cells());
}

bool DutyCycleMap::uniform_dwell() const {
  return std::all_of(row_dwell.begin(), row_dwell.end(),
                     [&](std::uint32_t d) { return d == row_dwell[0]; });
}

namespace {

void add_lane(std::uint32_t* dst, std::uint64_t v, std::uint32_t nbits,
              std::uint32_t dwell) {
  for (std::uint32_t b = 0; b < nbits; ++b) {
    dst[b] += static_cast<std::uint32_t>((v >> b) & 1u) * dwell;
  }
}

// Inferences after which the per-row policy state returns to its start,
// so the whole stream is that many inferences repeated.
std::uint32_t policy_period(const EncodingPolicy& policy,
                            std::uint32_t K_inf) {
  switch (policy.kind) {
    case PolicyKind::NONE: return 1;
    case PolicyKind::INVERSION: return K_inf % 2 == 0 ? 1 : 2;
    case PolicyKind::BARREL: {
      const std::uint32_t L = policy.max_shift + 1;
      return L / std::gcd(K_inf, L);
    }
    case PolicyKind::TRBG: return 0;  // stateful across the whole stream
  }
  fail("unknown policy kind");
}

}  // namespace

DutyCycleMap accumulate(const WriteStream& stream,
                        const EncodingPolicy& policy) {
  const Partition& part = stream.part;
  const MemoryGeometry& g = part.geom;
  const std::uint32_t lanes = g.lanes();
  const std::uint32_t K_inf = part.K_inf();

  std::uint32_t period = policy_period(policy, K_inf);
  if (period == 0 || period > stream.inferences) period = stream.inferences;
  const std::uint32_t n_full = stream.inferences / period;
  const std::uint32_t rem = stream.inferences % period;

  DutyCycleMap map;
  map.geom = g;
  map.ones.assign(g.cells(), 0);
  map.row_dwell.assign(g.rows, 0);

  Encoder enc(policy, g.word_bits, g.rows);
  std::vector<std::uint64_t> scratch(lanes);
  std::vector<std::uint32_t> ones_rem;

  for (std::uint32_t inf = 0; inf < period; ++inf) {
    if (rem != 0 && inf == rem) ones_rem = map.ones;
    for (const Block& blk : part.blocks) {
      const std::uint64_t* row_ptr = blk.bits.data();
      for (std::uint32_t r = 0; r < g.rows; ++r) {
        enc.encode({row_ptr, lanes}, scratch, r);
        std::uint32_t* cell =
            map.ones.data() + static_cast<std::uint64_t>(r) * g.word_bits;
        std::uint32_t remaining = g.word_bits;
        for (std::uint32_t l = 0; l < lanes; ++l) {
          const std::uint32_t nb = std::min<std::uint32_t>(64, remaining);
          add_lane(cell + 64ull * l, scratch[l], nb, stream.dwell_units);
          remaining -= nb;
        }
        row_ptr += lanes;
      }
      enc.on_block_boundary();
    }
  }

  if (n_full > 1 || rem != 0) {
    for (std::uint64_t i = 0; i < map.ones.size(); ++i) {
      std::uint64_t total =
          static_cast<std::uint64_t>(map.ones[i]) * n_full;
      if (rem != 0) total += ones_rem[i];
      map.ones[i] = static_cast<std::uint32_t>(total);
    }
  }

  const std::uint64_t dwell = static_cast<std::uint64_t>(K_inf) *
                              stream.inferences * stream.dwell_units;
  std::fill(map.row_dwell.begin(), map.row_dwell.end(),
            static_cast<std::uint32_t>(dwell));
  return map;
}

double SnmModel::deg(double duty) const {
  if (!curve.empty()) {
    const double d = std::clamp(duty, curve.front().first,
                                curve.back().first);
    auto hi = std::lower_bound(
        curve.begin(), curve.end(), d,
        [](const auto& p, double x) { return p.first < x; });
    if (hi == curve.begin()) return hi->second;
    if (hi == curve.end()) return curve.back().second;
    const auto lo = hi - 1;
    const double span = hi->first - lo->first;
    if (span <= 0.0) return lo->second;
    const double t = (d - lo->first) / span;
    return lo->second + t * (hi->second - lo->second);
  }
  // endpoints exact by construction
  if (duty == 0.5) return best;
  const double imbalance = std::abs(2.0 * duty - 1.0);
  if (imbalance >= 1.0) return worst;
  return best + (worst - best) * imbalance;
}

SnmModel load_snm_curve(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open curve file " + path);
  SnmModel model;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double d = 0.0, deg = 0.0;
    char comma = 0;
    if (!(ls >> d >> comma >> deg) || comma != ',') {
      // tolerate one header line
      if (model.curve.empty()) continue;
      fail("malformed curve line in " + path + ": " + line);
    }
    require(d >= 0.0 && d <= 1.0, "curve duty out of [0,1] in " + path);
    model.curve.emplace_back(d, deg);
  }
  require(model.curve.size() >= 2, "curve file " + path +
                                       " needs at least two points");
  std::sort(model.curve.begin(), model.curve.end());
  require(model.curve.front().first == 0.0 &&
              model.curve.back().first == 1.0,
          "curve must cover duty 0.0 through 1.0");
  double lo = model.curve[0].second, hi = model.curve[0].second;
  for (const auto& [d, deg] : model.curve) {
    lo = std::min(lo, deg);
    hi = std::max(hi, deg);
  }
  model.best = lo;
  model.worst = hi;
  return model;
}

std::vector<double> snm_of(const DutyCycleMap& map, const SnmModel& model) {
  require(!map.ones.empty(), "empty duty-cycle map");
  std::vector<double> out(map.cells());
  for (std::uint32_t r = 0; r < map.geom.rows; ++r) {
    require(map.row_dwell[r] > 0, "row with zero dwell");
    const double inv = 1.0 / map.row_dwell[r];
    const std::uint64_t base =
        static_cast<std::uint64_t>(r) * map.geom.word_bits;
    for (std::uint32_t i = 0; i < map.geom.word_bits; ++i) {
      out[base + i] = model.deg(map.ones[base + i] * inv);
    }
  }
  return out;
}

SnmHistogram histogram(std::span<const double> degradations,
                       std::uint32_t bins, const SnmModel& model) {
  require(!degradations.empty(), "histogram needs at least one value");
  require(bins >= 1, "bins must be >= 1");
  SnmHistogram h;
  h.lo = model.best;
  h.hi = model.worst;
  h.total = degradations.size();
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / bins;
  require(width > 0.0, "degenerate histogram range");
  for (double x : degradations) {
    if (x == h.lo) ++h.exact_best;
    if (x == h.hi) ++h.exact_worst;
    const double pos = (x - h.lo) / width;
    const std::int64_t raw = static_cast<std::int64_t>(pos);
    const std::uint32_t bin = static_cast<std::uint32_t>(
        std::clamp<std::int64_t>(raw, 0, bins - 1));
    ++h.counts[bin];
  }
  h.pct.resize(bins);
  for (std::uint32_t i = 0; i < bins; ++i) {
    h.pct[i] = 100.0 * static_cast<double>(h.counts[i]) /
               static_cast<double>(h.total);
  }
  return h;
}

DutySummary summarize(const DutyCycleMap& map) {
  require(!map.ones.empty(), "empty duty-cycle map");
  DutySummary s;
  s.min = 1.0;
  s.max = 0.0;
  double sum = 0.0, dev = 0.0;
  std::uint64_t within = 0;
  for (std::uint64_t c = 0; c < map.cells(); ++c) {
    const double d = map.duty(c);
    sum += d;
    dev += std::abs(d - 0.5);
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    within += std::abs(d - 0.5) <= 0.05;
  }
  const auto n = static_cast<double>(map.cells());
  s.mean = sum / n;
  s.mean_abs_dev = dev / n;
  s.frac_within_005 = static_cast<double>(within) / n;
  return s;
}

double mean_abs_dev_sigma(const DutyCycleMap& map) {
  const std::uint32_t rows = map.geom.rows;
  require(rows >= 2, "need at least two rows for a rowwise sigma");
  std::vector<double> row_mean(rows, 0.0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    const std::uint64_t base =
        static_cast<std::uint64_t>(r) * map.geom.word_bits;
    const double inv = 1.0 / map.row_dwell[r];
    double dev = 0.0;
    for (std::uint32_t i = 0; i < map.geom.word_bits; ++i) {
      dev += std::abs(map.ones[base + i] * inv - 0.5);
    }
    row_mean[r] = dev / map.geom.word_bits;
  }
  const double mean =
      std::accumulate(row_mean.begin(), row_mean.end(), 0.0) / rows;
  double var = 0.0;
  for (double m : row_mean) var += (m - mean) * (m - mean);
  var /= (rows - 1);
  return std::sqrt(var / rows);
}

}  // namespace agesim
