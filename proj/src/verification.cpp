#include "lcs/verification.hpp"

#include "lcs/errors.hpp"
#include "lcs/forms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace lcs {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return dist_(rng_); }
  Vec uniform(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform();
    return v;
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> dist_{-1.0, 1.0};
};

Vec chart_center(const SystemModel& model) {
  const Box& box = model.atlas.chart(model.default_chart).domain;
  Vec c = Vec::Zero(model.n);
  for (int i = 0; i < model.n; ++i)
    if (std::isfinite(box.lower[i]) && std::isfinite(box.upper[i]))
      c[i] = 0.5 * (box.lower[i] + box.upper[i]);
  return c;
}

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.note = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void finish(CheckResult& r, double measured, double tolerance) {
  r.measured = measured;
  r.tolerance = tolerance;
  r.passed = measured <= tolerance;
}

StepperConfig config_with_tol(double tol) {
  StepperConfig cfg;
  cfg.tol = tol;
  return cfg;
}

// Deviation between two points of possibly different charts, after moving
// the second into the chart of the first.
double point_deviation(const ConformalAtlas& atlas, const TrajectoryPoint& a,
                       const TrajectoryPoint& b) {
  Vec q = b.q;
  std::optional<Vec> p = b.p;
  if (a.chart != b.chart) {
    if (p) {
      const auto moved = transition_apply(atlas, b.chart, a.chart, b.q, *p, MomentumKind::P);
      q = moved.q;
      p = moved.momentum;
    } else {
      q = express_in_chart(atlas, b.chart, a.chart, b.q);
    }
  }
  double dev = inf_norm(a.q - q);
  if (a.p && p) dev = std::max(dev, inf_norm(*a.p - *p));
  return dev;
}

}  // namespace

CheckResult check_cocycle(const SystemModel& model, double tol) {
  return timed("cocycle", [&](CheckResult& r) {
    const auto rep = cocycle_check(model.atlas, 16, tol);
    finish(r, rep.max_deviation(), tol);
    r.passed = rep.passed;
    r.details.push_back({"overlaps", static_cast<double>(rep.overlaps.size())});
  });
}

CheckResult check_lee_form(const SystemModel& model, std::uint64_t seed, int samples) {
  return timed("lee_form", [&](CheckResult& r) {
    Sampler s(seed);
    const Vec center = chart_center(model);
    const ChartId chart = model.default_chart;
    const Chart& ch = model.atlas.chart(chart);
    double grad_err = 0.0;
    double closed_err = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec q = center + s.uniform(model.n);
      const Vec phi = lee_form(model.atlas, chart, q);
      const Vec fd = fd_gradient(ch.sigma, q, 1e-5);
      grad_err = std::max(grad_err, inf_norm(phi - fd) / std::max(1.0, inf_norm(phi)));
      const Mat J = fd_jacobian([&](const Vec& x) { return lee_form(model.atlas, chart, x); },
                                q, 1e-5);
      closed_err = std::max(closed_err, (J - J.transpose()).cwiseAbs().maxCoeff());
    }
    r.details.push_back({"closedness", closed_err});
    finish(r, grad_err, 1e-6);
    r.passed = r.passed && closed_err <= 1e-5;
  });
}

CheckResult check_two_form_determinant(const SystemModel& model, std::uint64_t seed,
                                       int samples) {
  return timed("two_form_determinant", [&](CheckResult& r) {
    Sampler s(seed);
    const Vec center = chart_center(model);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec q = center + s.uniform(model.n);
      const Vec p = 3.0 * s.uniform(model.n);
      const Mat W = lcs_two_form_matrix(model.atlas, model.default_chart, q, p);
      worst = std::max(worst, std::abs(W.determinant() - 1.0));
      worst = std::max(worst, (W + W.transpose()).cwiseAbs().maxCoeff());
    }
    finish(r, worst, 1e-12);
  });
}

CheckResult check_lagrangian_reduction(const SystemModel& model, std::uint64_t seed,
                                       int samples, double h, double tol) {
  return timed("reduction_lagrangian", [&](CheckResult& r) {
    Sampler s(seed);
    const ConformalAtlas constant = model.atlas.with_constant_sigma(0.37);
    const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
    const StepperConfig cfg = config_with_tol(tol);
    const Vec center = chart_center(model);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec q0 = center + 0.5 * s.uniform(model.n);
      const Vec q1 = q0 + h * s.uniform(model.n);
      const Vec a = dlcel_step(Ld, constant, model.default_chart, q0, q1, cfg).q_next;
      const Vec b = del_step(Ld, q0, q1, cfg).q_next;
      worst = std::max(worst, inf_norm(a - b));
    }
    finish(r, worst, 1e-12);
  });
}

CheckResult check_hamiltonian_reduction(const SystemModel& model, std::uint64_t seed,
                                        int samples, double h, double tol) {
  return timed("reduction_hamiltonian", [&](CheckResult& r) {
    Sampler s(seed);
    const ConformalAtlas constant = model.atlas.with_constant_sigma(0.37);
    const ChartId chart = model.default_chart;
    const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
    const auto Hr = build_right_hamiltonian(Ld, constant, chart);
    const auto Hl = build_left_hamiltonian(Ld, constant, chart);
    const StepperConfig cfg = config_with_tol(tol);
    const Vec center = chart_center(model);
    double right = 0.0;
    double left = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec q = center + 0.5 * s.uniform(model.n);
      const Vec p = s.uniform(model.n);
      const auto a = rdlch_step(Hr, constant, chart, q, p, cfg);
      const auto b = rd_step(Hr, q, p, cfg);
      right = std::max({right, inf_norm(a.q_next - b.q_next), inf_norm(a.p_next - b.p_next)});
      const auto c = ldlch_step(Hl, constant, chart, q, p, cfg);
      const auto d = ld_step(Hl, q, p, cfg);
      left = std::max({left, inf_norm(c.q_next - d.q_next), inf_norm(c.p_next - d.p_next)});
    }
    r.details.push_back({"right", right});
    r.details.push_back({"left", left});
    finish(r, std::max(right, left), 1e-12);
  });
}

CheckResult check_stationarity(const SystemModel& model, std::uint64_t seed,
                               int trajectories, int steps, double h, double tol,
                               double bound) {
  return timed("stationarity", [&](CheckResult& r) {
    Sampler s(seed);
    const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
    const StepperConfig cfg = config_with_tol(tol);
    const Vec center = chart_center(model);
    double worst = 0.0;
    for (int i = 0; i < trajectories; ++i) {
      const Vec q0 = center + 0.5 * s.uniform(model.n);
      const Vec q1 = q0 + h * s.uniform(model.n);
      const auto traj = integrate(Ld, model.atlas, model.default_chart, q0, q1, steps, cfg);
      worst = std::max(worst, stationarity_residual(Ld, model.atlas, traj));
    }
    finish(r, worst, bound);
  });
}

std::pair<CheckResult, CheckResult> check_commutation(const SystemModel& model,
                                                      HamiltonianSide side,
                                                      std::uint64_t seed, int steps,
                                                      double h, double tol, double bound) {
  const bool right = side == HamiltonianSide::Right;
  const std::string suffix = right ? "right" : "left";
  CheckResult relation;
  relation.name = "momentum_relation_" + suffix;
  relation.note = "not run";
  CheckResult commutation = timed("legendre_commutation_" + suffix, [&](CheckResult& r) {
    Sampler s(seed);
    const ChartId chart = model.default_chart;
    const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
    // bound is stated against tol; stopping exactly at tol lets it accumulate
    const StepperConfig cfg = config_with_tol(1e-2 * tol);
    const Vec q0 = chart_center(model) + 0.5 * s.uniform(model.n);
    const Vec p0 = s.uniform(model.n);
    const Vec q1 = initial_pair_from_momentum(Ld, model.atlas, chart, q0, p0, cfg);
    const auto lag = integrate(Ld, model.atlas, chart, q0, q1, steps, cfg);
    const auto ham = integrate_hamiltonian(
        Ld, model.atlas, chart, lag.points[0].q, *lag.points[0].p, steps, cfg,
        right ? HamiltonianScheme::RightConformal : HamiltonianScheme::LeftConformal);
    double worst = 0.0;
    for (std::size_t k = 0; k < lag.points.size(); ++k)
      worst = std::max(worst, point_deviation(model.atlas, lag.points[k], ham.points[k]));
    finish(r, worst, bound);

    relation = timed(relation.name, [&](CheckResult& rr) {
      double dev = 0.0;
      int count = 0;
      for (const auto* traj : {&lag, &ham})
        for (const auto& pt : traj->points) {
          const double w = std::exp(-model.atlas.sigma(pt.chart, pt.q));
          dev = std::max(dev, inf_norm(*pt.r - w * *pt.p));
          ++count;
        }
      rr.details.push_back({"points", static_cast<double>(count)});
      finish(rr, dev, 1e-12);
    });
  });
  return {commutation, relation};
}

CheckResult check_right_left_agreement(const SystemModel& model, std::uint64_t seed,
                                       int steps, double h, double tol) {
  return timed("right_left_agreement", [&](CheckResult& r) {
    Sampler s(seed);
    const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
    // bound is stated against tol; stopping exactly at tol lets it accumulate
    const StepperConfig cfg = config_with_tol(1e-2 * tol);
    const Vec q0 = chart_center(model) + 0.5 * s.uniform(model.n);
    const Vec p0 = s.uniform(model.n);
    const auto a = integrate_hamiltonian(Ld, model.atlas, model.default_chart, q0, p0, steps,
                                         cfg, HamiltonianScheme::Right);
    const auto b = integrate_hamiltonian(Ld, model.atlas, model.default_chart, q0, p0, steps,
                                         cfg, HamiltonianScheme::Left);
    const ConformalAtlas flat = model.atlas.flattened();
    double worst = 0.0;
    for (std::size_t k = 0; k < a.points.size(); ++k)
      worst = std::max(worst, point_deviation(flat, a.points[k], b.points[k]));
    finish(r, worst, 10.0 * tol);
  });
}

CheckResult check_convergence(const SystemModel& model, const std::vector<double>& hs,
                              double h_ref, double t_final, double lo, double hi) {
  return timed("convergence_order", [&](CheckResult& r) {
    RunSpec base;
    base.method = Method::Dlcel;
    base.rule = Rule::Midpoint;
    base.chart = model.default_chart;
    base.initial.kind = InitialData::Kind::Phase;
    base.initial.a = chart_center(model) + Vec::Ones(model.n);
    base.initial.b = 0.5 * Vec::Ones(model.n);
    const auto res = convergence_study(model, base, hs, t_final, h_ref);
    for (const auto& row : res.rows) r.details.push_back({"error_h=" + format_number(row.h), row.error});
    r.measured = res.slope;
    r.tolerance = hi;
    r.passed = res.slope >= lo && res.slope <= hi;
    r.note = "fitted slope must lie in [" + format_number(lo) + ", " + format_number(hi) + "]";
  });
}

CheckResult check_continuous_equivalence(const SystemModel& model, std::uint64_t seed,
                                         double h, double t_final, double bound) {
  return timed("continuous_equivalence", [&](CheckResult& r) {
    Sampler s(seed);
    const int n = model.n;
    const ChartId chart = model.default_chart;
    const Vec q0 = chart_center(model) + 0.5 * s.uniform(n);
    const Vec p0 = 0.5 * s.uniform(n);
    const VectorFn ham = lcs_hamiltonian_phase_field(model.hamiltonian, model.atlas, chart);
    const VectorFn lag = lcel_phase_field(model.lagrangian, model.atlas, chart);
    Vec x(2 * n), y(2 * n);
    x << q0, p0;
    y << q0, fiber_legendre_inv(model.lagrangian, q0, p0);
    const int steps = static_cast<int>(std::llround(t_final / h));
    double worst = 0.0;
    for (int k = 0; k <= steps; ++k) {
      if (k > 0) {
        x = rk4_step(ham, x, h);
        y = rk4_step(lag, y, h);
      }
      const Vec py = fiber_legendre(model.lagrangian, y.head(n), y.tail(n));
      worst = std::max({worst, inf_norm(x.head(n) - y.head(n)), inf_norm(x.tail(n) - py)});
    }
    finish(r, worst, bound);
  });
}

CheckResult check_lcs_condition(const SystemModel& model, Rule rule, std::uint64_t seed,
                                int samples) {
  return timed("lcs_condition_" + rule_name(rule), [&](CheckResult& r) {
    Sampler s(seed);
    const ChartId chart = model.default_chart;
    const double h = 0.1;
    const DiscreteLagrangian Ld = make_discrete_lagrangian(model, model.atlas, rule, h, chart);
    const TwoFormField form = lc_pc_two_form(Ld, model.atlas, chart);
    const VectorFn lee = [&](const Vec& q) { return lee_form(model.atlas, chart, q); };
    std::vector<Vec> pts;
    const Vec center = chart_center(model);
    for (int i = 0; i < samples; ++i) {
      const Vec q0 = center + 0.5 * s.uniform(model.n);
      Vec x(2 * model.n);
      x << q0, q0 + h * s.uniform(model.n);
      pts.push_back(x);
    }
    const auto rep = lcs_condition_check(form, lee, pts);
    r.measured = rep.max_deviation;
    r.tolerance = rep.tolerance;
    r.passed = rep.passed;
    r.note = rep.note;
    r.details.push_back({"scale", rep.scale});
  });
}

CheckResult check_divergence(const SystemModel& model, std::uint64_t seed, int samples,
                             double bound) {
  return timed("divergence_identity", [&](CheckResult& r) {
    Sampler s(seed);
    const int n = model.n;
    const ChartId chart = model.default_chart;
    const VectorFn field = lcs_hamiltonian_phase_field(model.hamiltonian, model.atlas, chart);
    const Vec center = chart_center(model);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      Vec x(2 * n);
      x << center + s.uniform(n), s.uniform(n);
      const double div = divergence_numeric(field, x, 1e-5);
      const Vec qdot = field(x).head(n);
      const double expected = n * lee_form(model.atlas, chart, x.head(n)).dot(qdot);
      worst = std::max(worst, std::abs(div - expected));
    }
    finish(r, worst, bound);
    r.note = kDivergenceNote;
  });
}

namespace {

DiscreteTrajectory rotor_run(const SystemModel& model, ChartId chart, double theta0, double h,
                             int steps, double margin) {
  const DiscreteLagrangian Ld = midpoint_rule(model.lagrangian, h);
  MarchOptions opts;
  opts.core_margin = margin;
  const Vec q0 = Vec::Constant(1, theta0);
  const Vec q1 = Vec::Constant(1, theta0 + h);
  return integrate(Ld, model.atlas, chart, q0, q1, steps, StepperConfig{}, opts);
}

int chart_switches(const DiscreteTrajectory& traj) {
  int count = 0;
  for (std::size_t k = 1; k < traj.points.size(); ++k)
    count += traj.points[k].chart != traj.points[k - 1].chart;
  return count;
}

}  // namespace

CheckResult check_chart_independence(const SystemModel& model, double h, int steps,
                                     double bound) {
  return timed("chart_independence", [&](CheckResult& r) {
    const double theta0 = 0.3;
    const auto base = rotor_run(model, model.default_chart, theta0, h, steps, 0.1);
    double worst = 0.0;
    for (double margin : {0.05, 0.2}) {
      const auto other = rotor_run(model, model.default_chart, theta0, h, steps, margin);
      for (std::size_t k = 0; k < base.points.size(); ++k)
        worst = std::max(worst, point_deviation(model.atlas, base.points[k], other.points[k]));
      r.details.push_back({"switches_margin_" + format_number(margin),
                           static_cast<double>(chart_switches(other))});
    }
    r.details.push_back({"switches_margin_0.1", static_cast<double>(chart_switches(base))});
    finish(r, worst, bound);
  });
}

CheckResult check_globalization(const SystemModel& circle, double h, int steps, double bound,
                                double cocycle_bound) {
  return timed("globalization", [&](CheckResult& r) {
    const SystemModel line = make_system("free_rotor_line", circle.sigma_params);
    const double theta0 = 0.3;
    const auto a = rotor_run(circle, circle.default_chart, theta0, h, steps, 0.1);
    const auto b = rotor_run(line, line.default_chart, theta0, h, steps, 0.1);
    const double two_pi = 2.0 * std::numbers::pi;
    double worst = 0.0;
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      const double tc = a.points[k].q[0];
      double te = b.points[k].q[0];
      te -= two_pi * std::round((te - tc) / two_pi);
      worst = std::max({worst, std::abs(te - tc), std::abs((*a.points[k].p)[0] - (*b.points[k].p)[0])});
    }
    const double cocycle = cocycle_check(circle.atlas).max_deviation();
    r.details.push_back({"chart_switches", static_cast<double>(chart_switches(a))});
    r.details.push_back({"cocycle_deviation", cocycle});
    r.details.push_back({"final_theta_cover", b.points.back().q[0]});
    finish(r, worst, bound);
    r.passed = r.passed && cocycle <= cocycle_bound && chart_switches(a) > 0;
  });
}

CheckResult check_exact_lagrangian(std::uint64_t seed, int pairs, double min_ratio) {
  return timed("exact_discrete_lagrangian", [&](CheckResult& r) {
    Sampler s(seed);
    const SystemModel model = make_system("harmonic_1d", {0.0});
    const double h1 = 0.1;
    const double h2 = 0.05;
    const auto ex1 = exact_discrete_lagrangian(model.lagrangian, model.atlas, 0, h1);
    const auto ex2 = exact_discrete_lagrangian(model.lagrangian, model.atlas, 0, h2);
    const auto mid1 = midpoint_rule(model.lagrangian, h1);
    const auto mid2 = midpoint_rule(model.lagrangian, h2);
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pairs; ++i) {
      const Vec q0 = s.uniform(1);
      const Vec v = s.uniform(1);
      const Vec a1 = q0 + h1 * v;
      const Vec a2 = q0 + h2 * v;
      const double e1 = std::abs(mid1.value(q0, a1) - ex1.value(q0, a1));
      const double e2 = std::abs(mid2.value(q0, a2) - ex2.value(q0, a2));
      worst_ratio = std::min(worst_ratio, e1 / e2);
    }
    r.measured = worst_ratio;
    r.tolerance = min_ratio;
    r.passed = worst_ratio >= min_ratio;
    r.note = "smallest error ratio over the pairs must be at least the tolerance";
  });
}

VerifyReport run_verify(const std::string& system, std::uint64_t seed) {
  const SystemModel model = make_system(system);
  VerifyReport rep;
  rep.system = system;
  rep.seed = seed;
  auto& c = rep.checks;
  c.push_back(check_cocycle(model));
  c.push_back(check_lee_form(model, seed));
  c.push_back(check_two_form_determinant(model, seed));
  c.push_back(check_lagrangian_reduction(model, seed));
  c.push_back(check_hamiltonian_reduction(model, seed));
  c.push_back(check_stationarity(model, seed));
  for (auto side : {HamiltonianSide::Right, HamiltonianSide::Left}) {
    auto [comm, rel] = check_commutation(model, side, seed);
    c.push_back(comm);
    c.push_back(rel);
  }
  c.push_back(check_right_left_agreement(model, seed));
  c.push_back(check_continuous_equivalence(model, seed));
  c.push_back(check_divergence(model, seed));
  c.push_back(check_lcs_condition(model, Rule::Midpoint, seed));
  c.push_back(check_lcs_condition(model, Rule::Trapezoidal, seed));
  if (model.atlas.charts().size() > 1) {
    c.push_back(check_chart_independence(model));
    c.push_back(check_globalization(model));
  }
  if (system == "harmonic_1d") c.push_back(check_exact_lagrangian(seed));
  return rep;
}

}  // namespace lcs
