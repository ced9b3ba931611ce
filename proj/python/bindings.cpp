#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "agesim/aging.hpp"
#include "agesim/bitstats.hpp"
#include "agesim/probmodel.hpp"
#include "agesim/report.hpp"
#include "agesim/sim.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bit-accurate aging simulator for SRAM weight memories";
  m.attr("__version__") = agesim::report::kToolVersion;

  m.def("p_duty_deviation", &agesim::p_duty_deviation, py::arg("K"),
        py::arg("rho"), py::arg("b"),
        "Probability that a cell's duty cycle lands outside [1/2 - b/K, "
        "1/2 + b/K] after K writes of i.i.d. Bernoulli(rho) bits.");

  m.def("p_at_least_n", &agesim::p_at_least_n, py::arg("K"), py::arg("rho"),
        py::arg("b"), py::arg("cells"), py::arg("n"),
        "Probability that at least n of `cells` independent cells deviate "
        "by more than b/K.");

  m.def(
      "deviation_curve",
      [](std::uint32_t K, double rho) {
        std::vector<std::tuple<std::uint32_t, double, double>> out;
        for (const agesim::CurvePoint& p : agesim::deviation_curve(K, rho)) {
          out.emplace_back(p.b, p.b_over_K, p.P);
        }
        return out;
      },
      py::arg("K"), py::arg("rho"),
      "Per-cell deviation probability for every b in [0, floor(K/2)], as "
      "(b, b_over_K, P) tuples.");

  m.def(
      "bit_probabilities",
      [](const std::vector<std::uint32_t>& words, std::uint32_t width) {
        return agesim::bit_distribution(words, width).p_one;
      },
      py::arg("words"), py::arg("width"),
      "Fraction of words holding a one at each bit position (LSB first).");

  m.def(
      "snm_degradation",
      [](double duty, double best, double worst) {
        agesim::SnmModel model;
        model.best = best;
        model.worst = worst;
        return model.deg(duty);
      },
      py::arg("duty"), py::arg("best") = 10.82, py::arg("worst") = 26.12,
      "SNM degradation (percent) of a cell held at the given duty cycle.");

  m.def(
      "run_json",
      [](const std::string& config_text, const std::string& base_dir) {
        const agesim::RunConfig config =
            agesim::parse_run_config(config_text, base_dir);
        std::string summary;
        {
          py::gil_scoped_release release;
          const agesim::RunResult result = agesim::run(config);
          summary = agesim::report::summary_json(result);
        }
        return summary;
      },
      py::arg("config_text"), py::arg("base_dir") = std::string("."),
      "Execute one simulation described by a JSON config string; returns "
      "the summary JSON text.");
}
