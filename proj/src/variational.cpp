#include "lcs/variational.hpp"

#include "lcs/hamiltonian_discrete.hpp"

#include <algorithm>
#include <cmath>

namespace lcs {

StepResult del_step(const DiscreteLagrangian& Ld, const Vec& q_prev, const Vec& q_curr,
                    const StepperConfig& cfg) {
  cfg.validate();
  const Vec momentum = Ld.d2(q_prev, q_curr);
  auto F = [&](const Vec& x) -> Vec { return momentum + Ld.d1(q_curr, x); };
  auto J = [&](const Vec& x) -> Mat { return Ld.d1d2(q_curr, x); };
  const auto res = newton_solve(F, 2.0 * q_curr - q_prev, cfg, J);
  return {res.x, res.iterations, res.residual};
}

StepResult dlcel_step(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                      ChartId chart, const Vec& q_prev, const Vec& q_curr,
                      const StepperConfig& cfg) {
  cfg.validate();
  const double sigma_prev = atlas.sigma(chart, q_prev);
  const double sigma_curr = atlas.sigma(chart, q_curr);
  const Vec phi = lee_form(atlas, chart, q_curr);
  const Vec momentum = std::exp(sigma_curr - sigma_prev) * Ld.d2(q_prev, q_curr);
  auto F = [&](const Vec& x) -> Vec {
    return momentum - phi * Ld.value(q_curr, x) + Ld.d1(q_curr, x);
  };
  auto J = [&](const Vec& x) -> Mat {
    return Ld.d1d2(q_curr, x) - phi * Ld.d2(q_curr, x).transpose();
  };
  const auto res = newton_solve(F, 2.0 * q_curr - q_prev, cfg, J);
  atlas.require_in_domain(chart, res.x);
  return {res.x, res.iterations, res.residual};
}

std::optional<ChartId> choose_chart(const ConformalAtlas& atlas, ChartId chart,
                                    const Vec& q_new, std::span<const Vec> carry,
                                    double core_margin) {
  if (atlas.chart(chart).domain.shrunk(core_margin).contains(q_new)) return std::nullopt;
  std::vector<Vec> pts(carry.begin(), carry.end());
  pts.push_back(q_new);
  for (const auto& t : atlas.transitions()) {
    if (t.from_chart != chart) continue;
    if (!std::all_of(pts.begin(), pts.end(),
                     [&](const Vec& q) { return t.overlap.contains(q); }))
      continue;
    const Vec image = t.forward(q_new);
    if (atlas.chart(t.to_chart).domain.shrunk(core_margin).contains(image))
      return t.to_chart;
  }
  return std::nullopt;
}

DiscreteTrajectory integrate(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             ChartId start_chart, const Vec& q0, const Vec& q1, int N,
                             const StepperConfig& cfg, const MarchOptions& opts) {
  if (N < 2) throw InvalidArgument("integrate: N must be >= 2");
  if (q0.size() != Ld.n || q1.size() != Ld.n)
    throw InvalidArgument("integrate: initial points must have length n");
  cfg.validate();
  const ConformalAtlas flat = opts.conformal ? ConformalAtlas() : atlas.flattened();
  const ConformalAtlas& A = opts.conformal ? atlas : flat;
  A.require_in_domain(start_chart, q0);
  A.require_in_domain(start_chart, q1);

  DiscreteTrajectory traj;
  traj.h = Ld.h;
  traj.points.reserve(static_cast<std::size_t>(N) + 1);
  traj.points.push_back({0, start_chart, q0, std::nullopt, std::nullopt});

  ChartId chart = start_chart;
  Vec prev = q0;
  Vec curr = q1;
  auto settle = [&](int k) {
    const Vec carry[] = {prev};
    bool switched = false;
    if (auto next = choose_chart(A, chart, curr, carry, opts.core_margin)) {
      prev = express_in_chart(A, chart, *next, prev);
      curr = express_in_chart(A, chart, *next, curr);
      chart = *next;
      switched = true;
    }
    traj.points.push_back({k, chart, curr, std::nullopt, std::nullopt});
    return switched;
  };
  settle(1);

  for (int k = 2; k <= N; ++k) {
    StepResult step;
    try {
      step = dlcel_step(Ld, A, chart, prev, curr, cfg);
    } catch (const Error& e) {
      throw IntegrationError(e.what(), k, std::move(traj));
    }
    prev = curr;
    curr = step.q_next;
    const bool switched = settle(k);
    traj.diagnostics.push_back({k, step.iterations, step.residual, switched});
  }

  if (opts.fill_momenta) momenta_along_trajectory(Ld, A, traj, 10.0 * cfg.tol);
  return traj;
}

double action_sum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                  const std::vector<ChartId>& charts, const std::vector<Vec>& qs) {
  if (qs.size() < 2) throw InvalidArgument("action_sum: need at least two points");
  if (charts.size() != qs.size())
    throw InvalidArgument("action_sum: one chart per point required");
  double S = 0.0;
  for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
    const Vec next = express_in_chart(atlas, charts[k + 1], charts[k], qs[k + 1]);
    S += std::exp(-atlas.sigma(charts[k], qs[k])) * Ld.value(qs[k], next);
  }
  return S;
}

double action_sum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                  ChartId chart, const std::vector<Vec>& qs) {
  return action_sum(Ld, atlas, std::vector<ChartId>(qs.size(), chart), qs);
}

namespace {

// Derivative of the two action terms containing q_k, in the chart of q_k.
double local_gradient(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                      ChartId chart, const Vec& prev, const Vec& curr, const Vec& next,
                      double eps) {
  const double w_prev = std::exp(-atlas.sigma(chart, prev));
  auto local_action = [&](const Vec& x) {
    return w_prev * Ld.value(prev, x) + std::exp(-atlas.sigma(chart, x)) * Ld.value(x, next);
  };
  double worst = 0.0;
  Vec x = curr;
  for (Eigen::Index i = 0; i < curr.size(); ++i) {
    const double step = eps * std::max(1.0, std::abs(curr[i]));
    x[i] = curr[i] + step;
    const double fp = local_action(x);
    x[i] = curr[i] - step;
    const double fm = local_action(x);
    x[i] = curr[i];
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * step)));
  }
  return worst;
}

}  // namespace

double stationarity_residual(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             const DiscreteTrajectory& traj, double eps) {
  const auto& pts = traj.points;
  if (pts.size() < 3)
    throw InvalidArgument("stationarity_residual: no interior points (need >= 3)");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
    const ChartId c = pts[k].chart;
    const Vec prev = express_in_chart(atlas, pts[k - 1].chart, c, pts[k - 1].q);
    const Vec next = express_in_chart(atlas, pts[k + 1].chart, c, pts[k + 1].q);
    worst = std::max(worst, local_gradient(Ld, atlas, c, prev, pts[k].q, next, eps));
  }
  return worst;
}

double stationarity_residual(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             ChartId chart, const std::vector<Vec>& qs, double eps) {
  DiscreteTrajectory traj;
  traj.h = Ld.h;
  for (std::size_t k = 0; k < qs.size(); ++k)
    traj.points.push_back({static_cast<int>(k), chart, qs[k], std::nullopt, std::nullopt});
  return stationarity_residual(Ld, atlas, traj, eps);
}

}  // namespace lcs
