#include "lcs/discretize.hpp"

#include "lcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace lcs {

namespace {

void require_positive_step(double h) {
  if (!(h > 0.0)) throw InvalidArgument("discrete Lagrangian step h must be positive");
}

}  // namespace

DiscreteLagrangian midpoint_rule(const ContinuousLagrangian& L, double h) {
  require_positive_step(h);
  auto lag = std::make_shared<const ContinuousLagrangian>(L);
  DiscreteLagrangian Ld;
  Ld.n = L.n;
  Ld.h = h;
  Ld.value = [lag, h](const Vec& q0, const Vec& q1) {
    return h * lag->value(0.5 * (q0 + q1), (q1 - q0) / h);
  };
  Ld.d1 = [lag, h](const Vec& q0, const Vec& q1) -> Vec {
    const Vec m = 0.5 * (q0 + q1);
    const Vec v = (q1 - q0) / h;
    return 0.5 * h * lag->grad_q(m, v) - lag->grad_v(m, v);
  };
  Ld.d2 = [lag, h](const Vec& q0, const Vec& q1) -> Vec {
    const Vec m = 0.5 * (q0 + q1);
    const Vec v = (q1 - q0) / h;
    return 0.5 * h * lag->grad_q(m, v) + lag->grad_v(m, v);
  };
  Ld.d1d2 = [lag, h](const Vec& q0, const Vec& q1) -> Mat {
    const Vec m = 0.5 * (q0 + q1);
    const Vec v = (q1 - q0) / h;
    const Mat Hvq = lag->hess_vq(m, v);
    return 0.25 * h * lag->hessian_qq(m, v) + 0.5 * (Hvq.transpose() - Hvq) -
           lag->hess_vv(m, v) / h;
  };
  return Ld;
}

DiscreteLagrangian trapezoidal_rule(const ContinuousLagrangian& L, double h) {
  require_positive_step(h);
  auto lag = std::make_shared<const ContinuousLagrangian>(L);
  DiscreteLagrangian Ld;
  Ld.n = L.n;
  Ld.h = h;
  Ld.value = [lag, h](const Vec& q0, const Vec& q1) {
    const Vec v = (q1 - q0) / h;
    return 0.5 * h * (lag->value(q0, v) + lag->value(q1, v));
  };
  Ld.d1 = [lag, h](const Vec& q0, const Vec& q1) -> Vec {
    const Vec v = (q1 - q0) / h;
    return 0.5 * h * lag->grad_q(q0, v) - 0.5 * (lag->grad_v(q0, v) + lag->grad_v(q1, v));
  };
  Ld.d2 = [lag, h](const Vec& q0, const Vec& q1) -> Vec {
    const Vec v = (q1 - q0) / h;
    return 0.5 * h * lag->grad_q(q1, v) + 0.5 * (lag->grad_v(q0, v) + lag->grad_v(q1, v));
  };
  Ld.d1d2 = [lag, h](const Vec& q0, const Vec& q1) -> Mat {
    const Vec v = (q1 - q0) / h;
    return 0.5 * lag->hess_vq(q0, v).transpose() - 0.5 * lag->hess_vq(q1, v) -
           (lag->hess_vv(q0, v) + lag->hess_vv(q1, v)) / (2.0 * h);
  };
  return Ld;
}

namespace {

struct ExactContext {
  ContinuousLagrangian L;
  ConformalAtlas atlas;
  ChartId chart;
  double h;
  ExactLagrangianOptions opts;
  VectorFn field;
};

// Integrates the phase state (q, v) over [0, t] with steps no longer than
// h / substeps.
Vec advance(const ExactContext& ctx, Vec x, double t) {
  if (t <= 0.0) return x;
  const double max_step = ctx.h / ctx.opts.substeps;
  const int steps = std::max(1, static_cast<int>(std::ceil(t / max_step - 1e-12)));
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) x = rk4_step(ctx.field, x, dt);
  return x;
}

Vec shoot(const ExactContext& ctx, const Vec& q0, const Vec& q1) {
  const Eigen::Index n = q0.size();
  auto endpoint_mismatch = [&](const Vec& v0) -> Vec {
    Vec x(2 * n);
    x << q0, v0;
    const Vec end = advance(ctx, x, ctx.h).head(n);
    if (!end.allFinite()) throw NumericalError("extremal is not finite over the step");
    return end - q1;
  };
  StepperConfig cfg;
  cfg.tol = std::max(ctx.opts.bvp_tol, 1e-14);
  cfg.max_iter = 50;
  try {
    return newton_solve(endpoint_mismatch, (q1 - q0) / ctx.h, cfg).x;
  } catch (const ConvergenceError&) {
    throw;
  } catch (const Error& e) {
    // a trial extremal left the chart or blew up; no endpoint residual exists
    throw ConvergenceError(std::string("shooting failed: ") + e.what(),
                           std::numeric_limits<double>::infinity(), 0);
  }
}

double exact_value(const ExactContext& ctx, const Vec& q0, const Vec& q1) {
  const Eigen::Index n = q0.size();
  const Vec v0 = shoot(ctx, q0, q1);
  const auto nodes = gauss_legendre_nodes(ctx.opts.quad_order);
  const auto weights = gauss_legendre_weights(ctx.opts.quad_order);
  Vec x(2 * n);
  x << q0, v0;
  double t = 0.0;
  double sum = 0.0;
  for (int i = 0; i < ctx.opts.quad_order; ++i) {
    const double node_t = 0.5 * ctx.h * (1.0 + nodes[i]);
    x = advance(ctx, x, node_t - t);
    t = node_t;
    sum += weights[i] * ctx.L.value(x.head(n), x.tail(n));
  }
  return 0.5 * ctx.h * sum;
}

}  // namespace

Vec shoot_initial_velocity(const ContinuousLagrangian& L, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q0, const Vec& q1, double h,
                           const ExactLagrangianOptions& opts) {
  require_positive_step(h);
  ExactContext ctx{L, atlas, chart, h, opts, lcel_phase_field(L, atlas, chart)};
  return shoot(ctx, q0, q1);
}

DiscreteLagrangian exact_discrete_lagrangian(const ContinuousLagrangian& L,
                                             const ConformalAtlas& atlas, ChartId chart,
                                             double h, const ExactLagrangianOptions& opts) {
  require_positive_step(h);
  if (opts.substeps < 1) throw InvalidArgument("exact_discrete_lagrangian: substeps < 1");
  gauss_legendre_nodes(opts.quad_order);  // validates the order
  auto ctx = std::make_shared<const ExactContext>(
      ExactContext{L, atlas, chart, h, opts, lcel_phase_field(L, atlas, chart)});

  DiscreteLagrangian Ld;
  Ld.n = L.n;
  Ld.h = h;
  Ld.value = [ctx](const Vec& q0, const Vec& q1) { return exact_value(*ctx, q0, q1); };
  Ld.d1 = [ctx](const Vec& q0, const Vec& q1) -> Vec {
    return fd_jacobian_scaled(
               [&](const Vec& x) { return Vec::Constant(1, exact_value(*ctx, x, q1)); },
               q0, ctx->opts.fd_epsilon)
        .row(0)
        .transpose();
  };
  Ld.d2 = [ctx](const Vec& q0, const Vec& q1) -> Vec {
    return fd_jacobian_scaled(
               [&](const Vec& x) { return Vec::Constant(1, exact_value(*ctx, q0, x)); },
               q1, ctx->opts.fd_epsilon)
        .row(0)
        .transpose();
  };
  Ld.d1d2 = [d2 = Ld.d2, eps = opts.fd_epsilon](const Vec& q0, const Vec& q1) -> Mat {
    // rows indexed by q0 components, columns by q1 components
    return fd_jacobian_scaled([&](const Vec& x) { return d2(x, q1); }, q0, eps)
        .transpose();
  };
  return Ld;
}

}  // namespace lcs
