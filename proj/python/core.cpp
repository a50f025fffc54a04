#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stablelab/config.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/mpath.hpp"
#include "stablelab/process.hpp"
#include "stablelab/stable.hpp"

namespace py = pybind11;
using namespace stablelab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "stable limit lab: stable laws, moving-average processes, path metrics";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<StableParams>(m, "StableParams")
      .def(py::init([](double alpha, double beta, double scale, double location) {
             StableParams p{alpha, beta, scale, location};
             validate(p);
             return p;
           }),
           py::arg("alpha"), py::arg("beta") = 0.0, py::arg("scale") = 1.0, py::arg("location") = 0.0)
      .def_readonly("alpha", &StableParams::alpha)
      .def_readonly("beta", &StableParams::beta)
      .def_readonly("scale", &StableParams::scale)
      .def_readonly("location", &StableParams::location)
      .def("__repr__", [](const StableParams& p) {
        return "StableParams(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
               ", scale=" + std::to_string(p.scale) + ", location=" + std::to_string(p.location) + ")";
      });

  m.def("cf", &cf_stable, py::arg("params"), py::arg("t"));
  m.def("cdf", [](const StableParams& p, double x) { return cdf_stable(p, x).value; }, py::arg("params"),
        py::arg("x"));
  m.def(
      "sample",
      [](const StableParams& p, std::size_t count, std::uint64_t seed) {
        auto stream = RngStream::derive(seed, "python/sample", 0);
        return sample_stable(p, count, stream);
      },
      py::arg("params"), py::arg("count"), py::arg("seed") = 0);

  py::class_<MAProcessSpec>(m, "MAProcessSpec")
      .def(py::init([](std::vector<double> coeffs, const StableParams& innovation) {
             MAProcessSpec s{std::move(coeffs), innovation};
             validate(s);
             return s;
           }),
           py::arg("coeffs"), py::arg("innovation"))
      .def_readonly("coeffs", &MAProcessSpec::coeffs)
      .def_readonly("innovation", &MAProcessSpec::innovation);

  m.def(
      "simulate_path",
      [](const MAProcessSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t index) {
        auto stream = RngStream::derive(seed, "simulate", index);
        return simulate_path(spec, n, stream);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed") = 0, py::arg("index") = 0);
  m.def("marginal_params", &marginal_params);
  m.def("sum_spectral", &sum_spectral, py::arg("spec"), py::arg("block"));
  m.def("limit_mu_inf", &limit_mu_inf);
  m.def("normalizing_constant", &normalizing_constant, py::arg("spec"), py::arg("n"));
  m.def(
      "verify_tangent_convergence",
      [](const MAProcessSpec& spec, const std::vector<std::size_t>& blocks) {
        const auto r = verify_tangent_convergence(spec, blocks);
        std::vector<std::pair<std::size_t, double>> rows;
        for (const auto& row : r.rows) rows.emplace_back(row.block, row.gap);
        return py::make_tuple(rows, r.monotone);
      },
      py::arg("spec"), py::arg("blocks"));

  py::class_<StepPath>(m, "StepPath")
      .def(py::init([](std::vector<double> times, std::vector<double> values) {
             StepPath p{std::move(times), std::move(values)};
             validate(p);
             return p;
           }),
           py::arg("times"), py::arg("values"))
      .def_readonly("times", &StepPath::times)
      .def_readonly("values", &StepPath::values);

  m.def("build_partial_sum_path", [](const std::vector<double>& x, double b) { return build_partial_sum_path(x, b); },
        py::arg("samples"), py::arg("b_n"));
  m.def("uniform_distance", &uniform_distance);
  m.def("m1_distance", &m1_distance, py::arg("x"), py::arg("y"), py::arg("tol") = 1e-3);
  m.def("j1_distance", &j1_distance, py::arg("x"), py::arg("y"), py::arg("tol") = 1e-3);
  m.def("sup_functional", &sup_functional);

  m.def(
      "config_hash",
      [](const std::string& text) { return hex_hash(parse_config(text).hash); }, py::arg("text"));
}
