#include "lcs/experiment.hpp"
#include "lcs/forms.hpp"
#include "lcs/hamiltonian_discrete.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace lcs;

namespace {

struct Stepping {
  SystemModel model;
  DiscreteLagrangian Ld;
  StepperConfig cfg;
};

Stepping stepping(const std::string& system, double h, const std::vector<double>& sigma_params,
                  const std::string& rule, double tol, ChartId chart, bool conformal) {
  Stepping s{make_system(system, sigma_params), {}, {}};
  s.cfg.tol = tol;
  s.cfg.validate();
  const ConformalAtlas atlas = conformal ? s.model.atlas : s.model.atlas.flattened();
  s.Ld = make_discrete_lagrangian(s.model, atlas, parse_rule(rule), h, chart);
  return s;
}

ChartId chart_or_default(const SystemModel& m, std::optional<int> chart) {
  return chart.value_or(m.default_chart);
}

py::dict run_to_dict(const RunOutput& run) {
  const auto rows = static_cast<Eigen::Index>(run.rows.size());
  const int n = run.n;
  Eigen::VectorXi k(rows), chart(rows);
  Vec t(rows), sigma(rows), energy(rows);
  Mat q(rows, n), p(rows, n), r(rows, n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = run.rows[static_cast<std::size_t>(i)];
    k[i] = row.k;
    chart[i] = row.chart;
    t[i] = row.t;
    sigma[i] = row.sigma;
    energy[i] = row.energy.value_or(nan);
    q.row(i) = row.q.transpose();
    p.row(i) = row.p ? Vec(row.p->transpose()) : Vec::Constant(n, nan);
    r.row(i) = row.r ? Vec(row.r->transpose()) : Vec::Constant(n, nan);
  }
  py::dict d;
  d["k"] = k;
  d["t"] = t;
  d["chart"] = chart;
  d["q"] = q;
  d["p"] = p;
  d["r"] = r;
  d["sigma"] = sigma;
  d["energy"] = energy;
  d["status"] = run.ok() ? "ok" : "failed";
  d["error"] = run.error ? py::object(py::str(*run.error)) : py::none();
  d["failed_index"] = run.failed_index;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Locally conformally symplectic variational integrators";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("builtin_systems", &builtin_systems);
  m.def("default_sigma_params", &default_sigma_params, py::arg("system"));

  m.def(
      "integrate_json",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
        const SystemModel model = model_for(cfg);
        RunOutput run;
        {
          py::gil_scoped_release release;
          run = run_method(model, spec_for(cfg, model));
        }
        return run_to_dict(run);
      },
      py::arg("config_json"), "Runs one configured method and returns its columns.");

  m.def(
      "convergence_json",
      [](const std::string& config_json, const std::vector<double>& hs,
         std::optional<double> h_ref) {
        const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
        const SystemModel model = model_for(cfg);
        ConvergenceResult res;
        {
          py::gil_scoped_release release;
          res = convergence_study(model, spec_for(cfg, model), hs, cfg.h * cfg.steps, h_ref);
        }
        return to_json(res).dump();
      },
      py::arg("config_json"), py::arg("hs"), py::arg("h_ref") = py::none());

  m.def(
      "verify_json",
      [](const std::string& system, std::uint64_t seed) {
        VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = run_verify(system, seed);
        }
        return to_json(rep).dump();
      },
      py::arg("system"), py::arg("seed") = 0);

  m.def(
      "del_step",
      [](const std::string& system, const Vec& q_prev, const Vec& q_curr, double h,
         const std::string& rule, double tol) {
        const auto s = stepping(system, h, {}, rule, tol, make_system(system).default_chart, false);
        return del_step(s.Ld, q_prev, q_curr, s.cfg).q_next;
      },
      py::arg("system"), py::arg("q_prev"), py::arg("q_curr"), py::arg("h"),
      py::arg("rule") = "midpoint", py::arg("tol") = 1e-12);

  m.def(
      "dlcel_step",
      [](const std::string& system, const Vec& q_prev, const Vec& q_curr, double h,
         const std::vector<double>& sigma_params, const std::string& rule, double tol,
         std::optional<int> chart) {
        const SystemModel model = make_system(system, sigma_params);
        const ChartId c = chart_or_default(model, chart);
        const auto s = stepping(system, h, sigma_params, rule, tol, c, true);
        return dlcel_step(s.Ld, s.model.atlas, c, q_prev, q_curr, s.cfg).q_next;
      },
      py::arg("system"), py::arg("q_prev"), py::arg("q_curr"), py::arg("h"),
      py::arg("sigma_params") = std::vector<double>{}, py::arg("rule") = "midpoint",
      py::arg("tol") = 1e-12, py::arg("chart") = py::none());

  m.def(
      "discrete_legendre",
      [](const std::string& system, const Vec& q0, const Vec& q1, double h,
         const std::vector<double>& sigma_params, const std::string& rule,
         std::optional<int> chart) {
        const SystemModel model = make_system(system, sigma_params);
        const ChartId c = chart_or_default(model, chart);
        const auto s = stepping(system, h, sigma_params, rule, 1e-12, c, true);
        const auto leg = discrete_legendre(s.Ld, s.model.atlas, c, q0, q1);
        py::dict d;
        d["r_plus"] = leg.r_plus;
        d["r_minus"] = leg.r_minus;
        d["p_plus"] = leg.p_plus;
        d["p_minus"] = leg.p_minus;
        return d;
      },
      py::arg("system"), py::arg("q0"), py::arg("q1"), py::arg("h"),
      py::arg("sigma_params") = std::vector<double>{}, py::arg("rule") = "midpoint",
      py::arg("chart") = py::none());

  m.def("a_matrix", &a_matrix, py::arg("phi"), py::arg("p"));

  m.def(
      "lcs_two_form_matrix",
      [](const std::string& system, const Vec& q, const Vec& p,
         const std::vector<double>& sigma_params, std::optional<int> chart) {
        const SystemModel model = make_system(system, sigma_params);
        return lcs_two_form_matrix(model.atlas, chart_or_default(model, chart), q, p);
      },
      py::arg("system"), py::arg("q"), py::arg("p"),
      py::arg("sigma_params") = std::vector<double>{}, py::arg("chart") = py::none());

  m.def(
      "cocycle_deviation",
      [](const std::string& system, const std::vector<double>& sigma_params) {
        return cocycle_check(make_system(system, sigma_params).atlas).max_deviation();
      },
      py::arg("system"), py::arg("sigma_params") = std::vector<double>{});
}
