#include "adcs/experiment.hpp"
#include "adcs/oracle.hpp"
#include "adcs/params.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

using Edges = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

adcs::ConstituentGraph make_graph(std::size_t n, const Edges& edges) {
  std::vector<adcs::Edge> e(edges.begin(), edges.end());
  return adcs::ConstituentGraph(n, std::move(e));
}

std::optional<adcs::Rational> optional_rational(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return adcs::parse_rational(*s);
}

// Runs with the GIL released; the core never touches Python objects.
py::tuple run_json(const std::string& config) {
  adcs::RunOutcome out;
  {
    py::gil_scoped_release release;
    try {
      out = adcs::run_experiment(adcs::config_from_json(adcs::Json::parse(config)));
    } catch (const adcs::ConfigError& e) {
      out.code = adcs::ExitCode::config_error;
      out.diagnostic = e.what();
    } catch (const adcs::Json::parse_error& e) {
      out.code = adcs::ExitCode::config_error;
      out.diagnostic = e.what();
    }
  }
  return py::make_tuple(out.summary.dump(), static_cast<int>(out.code), out.diagnostic);
}

py::tuple sweep_json(const std::string& spec) {
  adcs::SweepOutcome out;
  {
    py::gil_scoped_release release;
    out = adcs::run_sweep(adcs::sweep_from_json(adcs::Json::parse(spec)));
  }
  return py::make_tuple(out.report.dump(), static_cast<int>(out.code));
}

py::dict rmc_params(std::uint64_t k, std::uint64_t ell, std::uint32_t T, const std::string& epsilon,
                    const std::optional<std::string>& i_min) {
  const auto P = adcs::derive_rmc_params(k, ell, T, adcs::parse_rational(epsilon), optional_rational(i_min));
  py::dict d;
  d["k"] = P.k;
  d["d"] = P.d;
  d["p"] = P.p;
  d["b"] = P.b;
  d["r"] = P.r;
  d["c"] = P.c;
  d["alpha"] = P.alpha;
  d["beta"] = P.beta;
  d["gamma"] = P.gamma;
  d["delta"] = P.delta;
  d["tau"] = P.tau_string();
  d["rho_lower"] = adcs::to_string(P.rho_lower);
  d["rho_upper"] = adcs::to_string(P.rho_upper);
  return d;
}

py::dict mult_params(std::uint64_t n, std::uint32_t T, const std::optional<std::string>& i_min) {
  const auto M = adcs::derive_mult_params(n, T, optional_rational(i_min));
  py::dict d;
  d["n"] = M.n;
  d["d"] = M.d;
  d["c"] = M.c;
  d["alpha"] = M.alpha;
  d["phi_min"] = adcs::to_string(M.phi_min);
  d["b"] = M.b;
  d["r"] = M.r;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Counting and all-to-all exchange in anonymous dynamic networks";

  // Translators run newest first, so the base class goes in first.
  auto& base = py::register_exception<adcs::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<adcs::InfeasibleParameterError>(m, "InfeasibleParameterError", base.ptr());
  py::register_exception<adcs::ConfigError>(m, "ConfigError", base.ptr());

  m.def("run_json", &run_json, py::arg("config"),
        "Run one experiment from a JSON config; returns (summary JSON, exit code, diagnostic).");
  m.def("sweep_json", &sweep_json, py::arg("spec"), "Run a sweep spec; returns (report JSON, exit code).");
  m.def("rmc_params", &rmc_params, py::arg("k"), py::arg("ell"), py::arg("T"), py::arg("epsilon") = "1",
        py::arg("i_min") = py::none());
  m.def("mult_params", &mult_params, py::arg("n"), py::arg("T"), py::arg("i_min") = py::none());
  m.def(
      "broadcast_rounds",
      [](std::uint64_t n, std::uint32_t T, const std::optional<std::string>& i_min) {
        return adcs::broadcast_rounds(n, T, optional_rational(i_min));
      },
      py::arg("n"), py::arg("T"), py::arg("i_min") = py::none());
  m.def(
      "isoperimetric_number",
      [](std::size_t n, const Edges& edges) { return adcs::to_string(adcs::isoperimetric_number(make_graph(n, edges))); },
      py::arg("n"), py::arg("edges"), "Exact value as a 'p/q' string.");
  m.def(
      "conductance",
      [](std::size_t n, const Edges& edges, std::uint64_t d) {
        return adcs::to_string(adcs::conductance(adcs::share_matrix(make_graph(n, edges), d)));
      },
      py::arg("n"), py::arg("edges"), py::arg("d"), "Conductance of the one-round share matrix.");
  m.def(
      "share_matrix",
      [](std::size_t n, const Edges& edges, std::uint64_t d) {
        const auto P = adcs::share_matrix(make_graph(n, edges), d);
        std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(n));
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = 0; v < n; ++v) rows[u][v] = adcs::to_string(P.at(u, v));
        return rows;
      },
      py::arg("n"), py::arg("edges"), py::arg("d"));
  m.def(
      "truncate_share",
      [](const std::string& numerator, std::uint64_t d, std::uint32_t c) {
        const adcs::FixedPointParams s(d, c);
        return adcs::truncate_share(adcs::Potential(s, adcs::Int(numerator)), s).numerator().get_str();
      },
      py::arg("numerator"), py::arg("d"), py::arg("c"), "Numerators are decimal strings at scale d^c.");
}
