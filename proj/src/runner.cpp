#include "lcs/runner.hpp"

#include "lcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace lcs {

namespace {

struct MethodInfo {
  Method method;
  const char* name;
};

constexpr MethodInfo kMethods[] = {
    {Method::Del, "del"},         {Method::Dlcel, "dlcel"},
    {Method::Rd, "rd"},           {Method::Ld, "ld"},
    {Method::Rdlch, "rdlch"},     {Method::Ldlch, "ldlch"},
    {Method::Rk4Lcel, "rk4-lcel"}, {Method::Rk4Lcshe, "rk4-lcshe"},
};

}  // namespace

Method parse_method(const std::string& name) {
  for (const auto& m : kMethods)
    if (name == m.name) return m.method;
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  for (const auto& m : kMethods)
    if (m.method == method) return m.name;
  return "?";
}

Rule parse_rule(const std::string& name) {
  if (name == "midpoint") return Rule::Midpoint;
  if (name == "trapezoidal") return Rule::Trapezoidal;
  if (name == "exact") return Rule::Exact;
  throw InvalidArgument("unknown discretization '" + name + "'");
}

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Midpoint: return "midpoint";
    case Rule::Trapezoidal: return "trapezoidal";
    case Rule::Exact: return "exact";
  }
  return "?";
}

bool is_lagrangian(Method m) { return m == Method::Del || m == Method::Dlcel; }
bool is_hamiltonian(Method m) {
  return m == Method::Rd || m == Method::Ld || m == Method::Rdlch || m == Method::Ldlch;
}
bool is_continuous(Method m) { return m == Method::Rk4Lcel || m == Method::Rk4Lcshe; }
bool is_conformal(Method m) {
  return m != Method::Del && m != Method::Rd && m != Method::Ld;
}

DiscreteLagrangian make_discrete_lagrangian(const SystemModel& model,
                                            const ConformalAtlas& atlas, Rule rule, double h,
                                            ChartId chart) {
  switch (rule) {
    case Rule::Midpoint: return midpoint_rule(model.lagrangian, h);
    case Rule::Trapezoidal: return trapezoidal_rule(model.lagrangian, h);
    case Rule::Exact: return exact_discrete_lagrangian(model.lagrangian, atlas, chart, h);
  }
  throw InvalidArgument("unknown discretization");
}

namespace {

std::optional<double> row_energy(const SystemModel& model, const ConformalAtlas& atlas,
                                 ChartId chart, const Vec& q, const std::optional<Vec>& p) {
  if (!p) return std::nullopt;
  try {
    const Vec v = fiber_legendre_inv(model.lagrangian, q, *p);
    return energy(model.lagrangian, atlas, chart, q, v);
  } catch (const Error&) {
    return std::nullopt;
  }
}

OutputRow make_row(const SystemModel& model, const ConformalAtlas& atlas, double h,
                   const TrajectoryPoint& pt) {
  OutputRow row;
  row.k = pt.k;
  row.t = pt.k * h;
  row.chart = pt.chart;
  row.q = pt.q;
  row.p = pt.p;
  row.r = pt.r;
  row.sigma = atlas.sigma(pt.chart, pt.q);
  row.energy = row_energy(model, atlas, pt.chart, pt.q, pt.p);
  return row;
}

void append_trajectory(RunOutput& out, const SystemModel& model, const ConformalAtlas& atlas,
                       const DiscreteTrajectory& traj) {
  for (const auto& pt : traj.points) out.rows.push_back(make_row(model, atlas, traj.h, pt));
  out.diagnostics = traj.diagnostics;
}

void require_length(const Vec& v, int n, const char* what) {
  if (v.size() != n)
    throw InvalidArgument(std::string("initial ") + what + " must have length " +
                          std::to_string(n));
}

RunOutput run_continuous(const SystemModel& model, const RunSpec& spec) {
  const ConformalAtlas& atlas = model.atlas;
  const ChartId chart = spec.chart;
  const int n = model.n;
  RunOutput out;
  out.n = n;
  const bool lagrangian_side = spec.method == Method::Rk4Lcel;
  const VectorFn field =
      lagrangian_side ? lcel_phase_field(model.lagrangian, atlas, chart)
                      : lcs_hamiltonian_phase_field(model.hamiltonian, atlas, chart);

  Vec x(2 * n);
  const Vec& q0 = spec.initial.a;
  const Vec& p0 = spec.initial.b;
  if (lagrangian_side)
    x << q0, fiber_legendre_inv(model.lagrangian, q0, p0, spec.cfg);
  else
    x << q0, p0;

  auto record = [&](int k, const Vec& state) {
    OutputRow row;
    row.k = k;
    row.t = k * spec.h;
    row.chart = chart;
    row.q = state.head(n);
    row.sigma = atlas.sigma(chart, row.q);
    const Vec second = state.tail(n);
    const Vec p = lagrangian_side ? fiber_legendre(model.lagrangian, row.q, second) : second;
    row.p = p;
    row.r = std::exp(-row.sigma) * p;
    row.energy = lagrangian_side ? energy(model.lagrangian, atlas, chart, row.q, second)
                                 : *row_energy(model, atlas, chart, row.q, row.p);
    out.rows.push_back(std::move(row));
  };

  try {
    record(0, x);
    for (int k = 1; k <= spec.steps; ++k) {
      x = rk4_step(field, x, spec.h);
      if (!x.allFinite())
        throw NumericalError("rk4: non-finite state at step " + std::to_string(k));
      atlas.require_in_domain(chart, x.head(n));
      record(k, x);
      out.diagnostics.push_back({k, 0, 0.0, false});
    }
  } catch (const Error& e) {
    out.error = e.what();
    out.failed_index = static_cast<int>(out.rows.size());
  }
  return out;
}

}  // namespace

RunOutput run_method(const SystemModel& model, const RunSpec& spec) {
  if (!(spec.h > 0.0)) throw InvalidArgument("h must be positive");
  if (spec.steps < 1) throw InvalidArgument("steps must be >= 1");
  spec.cfg.validate();
  const int n = model.n;
  require_length(spec.initial.a, n, "point");
  require_length(spec.initial.b, n, "second vector");
  if (!model.atlas.has_chart(spec.chart)) throw UnknownChartError(spec.chart);
  if (!is_lagrangian(spec.method) && spec.initial.kind != InitialData::Kind::Phase)
    throw InvalidArgument(method_name(spec.method) + " needs (q, p) initial data");
  model.atlas.require_in_domain(spec.chart, spec.initial.a);

  if (is_continuous(spec.method)) return run_continuous(model, spec);

  const ConformalAtlas atlas =
      is_conformal(spec.method) ? model.atlas : model.atlas.flattened();
  const DiscreteLagrangian Ld = make_discrete_lagrangian(model, atlas, spec.rule, spec.h, spec.chart);
  RunOutput out;
  out.n = n;
  try {
    DiscreteTrajectory traj;
    if (is_lagrangian(spec.method)) {
      if (spec.steps < 2) throw InvalidArgument("Lagrangian methods need steps >= 2");
      const Vec& q0 = spec.initial.a;
      const Vec q1 = spec.initial.kind == InitialData::Kind::Pair
                         ? spec.initial.b
                         : initial_pair_from_momentum(Ld, atlas, spec.chart, q0,
                                                      spec.initial.b, spec.cfg);
      MarchOptions opts;
      opts.conformal = true;  // atlas is already flattened for del
      opts.core_margin = spec.core_margin;
      traj = integrate(Ld, atlas, spec.chart, q0, q1, spec.steps, spec.cfg, opts);
    } else {
      const HamiltonianScheme scheme = spec.method == Method::Rd   ? HamiltonianScheme::Right
                                       : spec.method == Method::Ld ? HamiltonianScheme::Left
                                       : spec.method == Method::Rdlch
                                           ? HamiltonianScheme::RightConformal
                                           : HamiltonianScheme::LeftConformal;
      traj = integrate_hamiltonian(Ld, atlas, spec.chart, spec.initial.a, spec.initial.b,
                                   spec.steps, spec.cfg, scheme, spec.core_margin);
    }
    append_trajectory(out, model, atlas, traj);
  } catch (const IntegrationError& e) {
    DiscreteTrajectory partial = e.partial();
    if (partial.points.size() >= 2) {
      try {
        momenta_along_trajectory(Ld, atlas, partial, 10.0 * spec.cfg.tol);
      } catch (const Error&) {
      }
    }
    append_trajectory(out, model, atlas, partial);
    out.error = e.what();
    out.failed_index = e.failed_index();
  } catch (const NumericalError& e) {
    out.error = e.what();
    out.failed_index = static_cast<int>(out.rows.size());
  } catch (const DomainError& e) {
    out.error = e.what();
    out.failed_index = static_cast<int>(out.rows.size());
  }
  return out;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
  return buf;
}

void write_csv(std::ostream& out, const RunOutput& run) {
  const int n = run.n;
  out << "k,t,chart";
  for (const char* prefix : {"q_", "p_", "r_"})
    for (int i = 0; i < n; ++i) out << ',' << prefix << i;
  out << ",sigma,energy\n";
  auto vec_cells = [&](const std::optional<Vec>& v) {
    for (int i = 0; i < n; ++i) {
      out << ',';
      if (v) out << format_number((*v)[i]);
    }
  };
  for (const auto& row : run.rows) {
    out << row.k << ',' << format_number(row.t) << ',' << row.chart;
    vec_cells(row.q);
    vec_cells(row.p);
    vec_cells(row.r);
    out << ',' << format_number(row.sigma) << ',';
    if (row.energy) out << format_number(*row.energy);
    out << '\n';
  }
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("least_squares_slope: need two or more paired values");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

int steps_for(double t_final, double h) {
  const double ratio = t_final / h;
  const int steps = static_cast<int>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw InvalidArgument("step " + format_number(h) + " does not divide the final time " +
                          format_number(t_final));
  return steps;
}

}  // namespace

ConvergenceResult convergence_study(const SystemModel& model, const RunSpec& base,
                                    const std::vector<double>& hs, double t_final,
                                    std::optional<double> h_ref) {
  if (hs.size() < 3) throw InvalidArgument("convergence needs at least three h values");
  if (base.initial.kind != InitialData::Kind::Phase)
    throw InvalidArgument("convergence needs (q, p) initial data");
  if (!(t_final > 0.0)) throw InvalidArgument("convergence: final time must be positive");
  ConvergenceResult result;
  result.t_final = t_final;
  result.h_ref = h_ref.value_or(*std::min_element(hs.begin(), hs.end()) / 100.0);

  RunSpec ref = base;
  ref.method = Method::Rk4Lcel;
  ref.h = result.h_ref;
  ref.steps = steps_for(t_final, ref.h);
  const RunOutput reference = run_method(model, ref);
  if (!reference.ok()) throw NumericalError("reference run failed: " + *reference.error);
  const Vec q_ref = reference.rows.back().q;

  std::vector<double> lx, ly;
  for (double h : hs) {
    RunSpec spec = base;
    spec.h = h;
    spec.steps = steps_for(t_final, h);
    const RunOutput run = run_method(model, spec);
    if (!run.ok()) throw NumericalError("run at h=" + format_number(h) + " failed: " + *run.error);
    const OutputRow& last = run.rows.back();
    const Vec q = express_in_chart(model.atlas, last.chart, base.chart, last.q);
    const double err = inf_norm(q - q_ref);
    result.rows.push_back({h, spec.steps, err});
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  result.slope = least_squares_slope(lx, ly);
  return result;
}

}  // namespace lcs
