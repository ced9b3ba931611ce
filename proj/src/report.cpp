#include "agesim/report.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "agesim/errors.hpp"

namespace agesim::report {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  require(res.ec == std::errc(), "number formatting failed");
  return {buf, res.ptr};
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& config) {
  const std::uint64_t h = fnv1a64(config_json(config));
  char buf[17];
  for (int i = 0; i < 16; ++i) {
    buf[15 - i] = "0123456789abcdef"[(h >> (4 * i)) & 0xF];
  }
  buf[16] = '\0';
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    require(!ec, "cannot create directory " + target.parent_path().string());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(out.good(), "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  require(!ec, "cannot rename " + tmp.string() + " to " + path);
}

std::string histogram_csv(const SnmHistogram& hist) {
  std::string csv = "bin_lo,bin_hi,count,pct\n";
  const std::uint32_t bins = static_cast<std::uint32_t>(hist.counts.size());
  const double width = (hist.hi - hist.lo) / bins;
  for (std::uint32_t i = 0; i < bins; ++i) {
    const double lo = hist.lo + i * width;
    const double hi = i + 1 == bins ? hist.hi : hist.lo + (i + 1) * width;
    csv += format_double(lo) + "," + format_double(hi) + "," +
           std::to_string(hist.counts[i]) + "," + format_double(hist.pct[i]) +
           "\n";
  }
  return csv;
}

std::string bits_csv(const BitDistribution& dist) {
  std::string csv = "bit_index,p_one\n";
  for (std::uint32_t i = 0; i < dist.word_width; ++i) {
    csv += std::to_string(i) + "," + format_double(dist.p_one[i]) + "\n";
  }
  return csv;
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::string csv = "b,b_over_K,P\n";
  for (const CurvePoint& p : curve) {
    csv += std::to_string(p.b) + "," + format_double(p.b_over_K) + "," +
           format_double(p.P) + "\n";
  }
  return csv;
}

std::string compare_csv(const CompareReport& report) {
  std::string csv = "b,b_over_K,predicted,empirical,sigma,within_3sigma\n";
  for (const CompareRow& r : report.rows) {
    csv += std::to_string(r.b) + "," + format_double(r.b_over_K) + "," +
           format_double(r.predicted) + "," + format_double(r.empirical) +
           "," + format_double(r.sigma) + "," +
           (r.within_3sigma ? "1" : "0") + "\n";
  }
  return csv;
}

namespace {

json histogram_json(const SnmHistogram& hist) {
  return {{"lo", hist.lo},
          {"hi", hist.hi},
          {"bins", hist.counts.size()},
          {"counts", hist.counts},
          {"pct", hist.pct},
          {"exact_best", hist.exact_best},
          {"exact_worst", hist.exact_worst},
          {"total", hist.total}};
}

json duty_json(const DutySummary& duty) {
  return {{"mean", duty.mean},
          {"min", duty.min},
          {"max", duty.max},
          {"frac_within_005", duty.frac_within_005},
          {"mean_abs_dev", duty.mean_abs_dev}};
}

std::string duty_map_bytes(const DutyCycleMap& map) {
  static_assert(std::endian::native == std::endian::little,
                "duty map dump is little-endian");
  std::string bytes;
  bytes.resize(map.cells() * 8);
  char* p = bytes.data();
  for (std::uint32_t r = 0; r < map.geom.rows; ++r) {
    const std::uint32_t dwell = map.row_dwell[r];
    const std::uint32_t* ones =
        map.ones.data() + static_cast<std::uint64_t>(r) * map.geom.word_bits;
    for (std::uint32_t i = 0; i < map.geom.word_bits; ++i) {
      std::memcpy(p, &ones[i], 4);
      std::memcpy(p + 4, &dwell, 4);
      p += 8;
    }
  }
  return bytes;
}

}  // namespace

std::string summary_json(const RunResult& result) {
  json summary;
  summary["tool"] = "agesim";
  summary["version"] = kToolVersion;
  summary["config"] = json::parse(config_json(result.config));
  summary["config_hash"] = config_hash_hex(result.config);
  summary["seed"] = result.config.seed;
  summary["network_name"] = result.network_name;
  summary["geometry"] = {{"rows", result.map.geom.rows},
                         {"word_bits", result.map.geom.word_bits},
                         {"cells", result.map.geom.cells()}};
  summary["k_inf"] = result.K_inf;
  summary["k_total"] = result.K_total;
  summary["padding_fraction"] = result.padding_fraction;
  summary["duty"] = duty_json(result.duty);
  summary["histogram"] = histogram_json(result.hist);
  summary["files"] = {
      {"histogram_csv", "histogram.csv"},
      {"duty_map", result.config.dump_duty_map ? json("duty_map.bin")
                                               : json(nullptr)}};
  return summary.dump(2) + "\n";
}

std::vector<std::string> emit_run(const RunResult& result,
                                  const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::vector<std::string> files;
  const auto put = [&](const char* name, const std::string& content) {
    const std::string path = (dir / name).string();
    write_text_atomic(path, content);
    files.push_back(path);
  };
  put("summary.json", summary_json(result));
  put("histogram.csv", histogram_csv(result.hist));
  if (result.config.dump_duty_map) {
    put("duty_map.bin", duty_map_bytes(result.map));
  }
  return files;
}

std::vector<std::string> emit_matrix(const MatrixResult& matrix,
                                     const std::string& out_dir) {
  std::string csv =
      "network,format,policy,mean_abs_dev,pct_worst_bin,pct_best_bin\n";
  json entries = json::array();
  for (const MatrixEntry& e : matrix.entries) {
    if (!e.ok) {
      entries.push_back({{"ok", false}, {"error", e.error}});
      continue;
    }
    const RunResult& r = *e.result;
    const char* fmt = format_name(r.config.format);
    const char* pol = policy_name(r.config.policy.kind);
    csv += r.network_name;
    csv += ",";
    csv += fmt;
    csv += ",";
    csv += pol;
    csv += "," + format_double(r.duty.mean_abs_dev) + "," +
           format_double(r.hist.pct.back()) + "," +
           format_double(r.hist.pct.front()) + "\n";
    entries.push_back({{"ok", true},
                       {"network", r.network_name},
                       {"format", fmt},
                       {"policy", pol},
                       {"config_hash", config_hash_hex(r.config)},
                       {"k_inf", r.K_inf},
                       {"k_total", r.K_total},
                       {"padding_fraction", r.padding_fraction},
                       {"duty", duty_json(r.duty)},
                       {"pct_best_bin", r.hist.pct.front()},
                       {"pct_worst_bin", r.hist.pct.back()}});
  }
  json combined = {{"tool", "agesim"},
                   {"version", kToolVersion},
                   {"entries", entries}};

  const fs::path dir(out_dir);
  std::vector<std::string> files;
  const std::string csv_path = (dir / "matrix.csv").string();
  write_text_atomic(csv_path, csv);
  files.push_back(csv_path);
  const std::string json_path = (dir / "matrix.json").string();
  write_text_atomic(json_path, combined.dump(2) + "\n");
  files.push_back(json_path);
  return files;
}

DutyCycleMap load_duty_map(const std::string& run_dir) {
  const fs::path dir(run_dir);
  std::ifstream sin(dir / "summary.json");
  require(sin.good(), "cannot open " + (dir / "summary.json").string());
  json summary;
  try {
    sin >> summary;
  } catch (const json::exception& e) {
    fail("summary.json in " + run_dir + ": " + e.what());
  }
  const auto& jg = summary.at("geometry");

  DutyCycleMap map;
  map.geom = make_geometry(jg.at("cells").get<std::uint64_t>(),
                           jg.at("word_bits").get<std::uint32_t>());
  require(map.geom.rows == jg.at("rows").get<std::uint32_t>(),
          "inconsistent geometry in summary.json");

  const fs::path bin = dir / "duty_map.bin";
  std::ifstream in(bin, std::ios::binary);
  require(in.good(), "cannot open " + bin.string() +
                         " (was the run emitted with dump_duty_map?)");
  in.seekg(0, std::ios::end);
  const std::uint64_t bytes = static_cast<std::uint64_t>(in.tellg());
  require(bytes == map.geom.cells() * 8,
          bin.string() + " holds " + std::to_string(bytes) +
              " bytes, expected " + std::to_string(map.geom.cells() * 8));
  in.seekg(0);

  map.ones.resize(map.geom.cells());
  map.row_dwell.assign(map.geom.rows, 0);
  std::vector<char> buf(static_cast<std::size_t>(map.geom.word_bits) * 8);
  for (std::uint32_t r = 0; r < map.geom.rows; ++r) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    require(in.good(), "short read on " + bin.string());
    std::uint32_t* ones =
        map.ones.data() + static_cast<std::uint64_t>(r) * map.geom.word_bits;
    for (std::uint32_t i = 0; i < map.geom.word_bits; ++i) {
      std::uint32_t dwell = 0;
      std::memcpy(&ones[i], buf.data() + i * 8, 4);
      std::memcpy(&dwell, buf.data() + i * 8 + 4, 4);
      if (i == 0) {
        map.row_dwell[r] = dwell;
      } else {
        require(dwell == map.row_dwell[r],
                "inconsistent dwell within a row in " + bin.string());
      }
    }
  }
  return map;
}

}  // namespace agesim::report
