#include "lcs/hamiltonian_discrete.hpp"

#include "lcs/errors.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace lcs {

MomentumPair make_momentum_pair(const ConformalAtlas& atlas, ChartId chart, const Vec& q,
                                const Vec& p) {
  return {std::exp(-atlas.sigma(chart, q)) * p, p, chart, q};
}

DiscreteLegendre discrete_legendre(const DiscreteLagrangian& Ld,
                                   const ConformalAtlas& atlas, ChartId chart,
                                   const Vec& q0, const Vec& q1) {
  atlas.require_in_domain(chart, q1);
  const double s0 = atlas.sigma(chart, q0);
  const double w = std::exp(-s0);
  DiscreteLegendre out;
  out.r_plus = w * Ld.d2(q0, q1);
  out.r_minus = w * (lee_form(atlas, chart, q0) * Ld.value(q0, q1) - Ld.d1(q0, q1));
  out.p_plus = std::exp(s0) * out.r_plus;
  out.p_minus = std::exp(s0) * out.r_minus;
  return out;
}

void momenta_along_trajectory(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                              DiscreteTrajectory& traj, double tol) {
  auto& pts = traj.points;
  const std::size_t N = pts.size() - 1;
  if (pts.size() < 2) throw InvalidArgument("momenta_along_trajectory: need two points");
  for (std::size_t k = 0; k <= N; ++k) {
    const ChartId c = pts[k].chart;
    const Vec& q = pts[k].q;
    const double s = atlas.sigma(c, q);
    std::optional<Vec> minus;
    std::optional<Vec> shifted;
    if (k < N) {
      const Vec next = express_in_chart(atlas, pts[k + 1].chart, c, pts[k + 1].q);
      minus = lee_form(atlas, c, q) * Ld.value(q, next) - Ld.d1(q, next);
    }
    if (k > 0) {
      const Vec prev = express_in_chart(atlas, pts[k - 1].chart, c, pts[k - 1].q);
      shifted = std::exp(s - atlas.sigma(c, prev)) * Ld.d2(prev, q);
    }
    if (minus && shifted) {
      const double dev = inf_norm(*minus - *shifted);
      if (dev > tol * std::max(1.0, inf_norm(*minus)))
        throw ConsistencyError(static_cast<int>(k), dev);
    }
    const Vec p = minus ? *minus : *shifted;
    pts[k].r = std::exp(-s) * p;
    pts[k].p = p;
  }
}

HamiltonianJet DiscreteHamiltonian::jet(const Vec& a, const Vec& b) const {
  if (jet_fn) return jet_fn(a, b);
  return {value(a, b), d1(a, b), d2(a, b)};
}

Vec DiscreteHamiltonian::seed(const Vec& q, const Vec& p) const {
  if (step_seed) return step_seed(q, p);
  return q + h * p;
}

namespace {

int det_sign(const Mat& J) {
  const double d = J.determinant();
  return (d > 0.0) - (d < 0.0);
}

// Solves G(x) = 0 from x0 and rejects solutions on a different sheet of the
// inversion than the seed.
Vec invert_tracking_branch(const VectorFn& G, const Vec& x0, const StepperConfig& inner,
                           const char* what) {
  const auto res = newton_solve(G, x0, inner);
  const int s0 = det_sign(fd_jacobian_scaled(G, x0, inner.fd_epsilon));
  const int s1 = det_sign(fd_jacobian_scaled(G, res.x, inner.fd_epsilon));
  if (s0 != s1)
    throw BranchError(std::string(what) + ": inversion Jacobian changed sign between seed and solution");
  return res.x;
}

Vec linear_seed(const DiscreteLagrangian& Ld, const Vec& anchor, const Vec& rhs) {
  return solve_linear(-Ld.d1d2(anchor, anchor), rhs, kNewtonMaxCondition);
}

}  // namespace

Vec right_inversion(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                    ChartId chart, const Vec& q, const Vec& p_next,
                    const StepperConfig& inner) {
  const double sq = atlas.sigma(chart, q);
  auto G = [&](const Vec& Q) -> Vec {
    return std::exp(atlas.sigma(chart, Q) - sq) * Ld.d2(q, Q) - p_next;
  };
  const Vec Q0 = q + linear_seed(Ld, q, p_next - Ld.d2(q, q));
  return invert_tracking_branch(G, Q0, inner, "right discrete Hamiltonian");
}

Vec left_inversion(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                   ChartId chart, const Vec& q_next, const Vec& p,
                   const StepperConfig& inner) {
  atlas.require_in_domain(chart, q_next);
  auto G = [&](const Vec& q) -> Vec {
    return lee_form(atlas, chart, q) * Ld.value(q, q_next) - Ld.d1(q, q_next) - p;
  };
  const Vec q0 = q_next - linear_seed(Ld, q_next, p + Ld.d1(q_next, q_next));
  return invert_tracking_branch(G, q0, inner, "left discrete Hamiltonian");
}

namespace {

struct HamiltonianContext {
  DiscreteLagrangian Ld;
  ConformalAtlas atlas;
  ChartId chart;
  StepperConfig inner;
};

DiscreteHamiltonian assemble(std::shared_ptr<const HamiltonianContext> ctx,
                             HamiltonianSide side,
                             std::function<HamiltonianJet(const Vec&, const Vec&)> jet) {
  DiscreteHamiltonian H;
  H.n = ctx->Ld.n;
  H.h = ctx->Ld.h;
  H.side = side;
  H.provenance = HamiltonianProvenance::FromLagrangian;
  H.jet_fn = jet;
  H.value = [jet](const Vec& a, const Vec& b) { return jet(a, b).value; };
  H.d1 = [jet](const Vec& a, const Vec& b) { return jet(a, b).d1; };
  H.d2 = [jet](const Vec& a, const Vec& b) { return jet(a, b).d2; };
  H.step_seed = [ctx](const Vec& q, const Vec& p) -> Vec {
    return q + linear_seed(ctx->Ld, q, p + ctx->Ld.d1(q, q));
  };
  return H;
}

}  // namespace

DiscreteHamiltonian build_right_hamiltonian(const DiscreteLagrangian& Ld,
                                            const ConformalAtlas& atlas, ChartId chart,
                                            const StepperConfig& inner) {
  inner.validate();
  atlas.chart(chart);
  auto ctx = std::make_shared<const HamiltonianContext>(
      HamiltonianContext{Ld, atlas, chart, inner});
  auto jet = [ctx](const Vec& q, const Vec& p_next) -> HamiltonianJet {
    const auto& [Ld, atlas, chart, inner] = *ctx;
    const Vec Q = right_inversion(Ld, atlas, chart, q, p_next, inner);
    const double scale = std::exp(atlas.sigma(chart, q) - atlas.sigma(chart, Q));
    const double L = Ld.value(q, Q);
    HamiltonianJet out;
    out.value = scale * p_next.dot(Q) - L;
    out.d1 = lee_form(atlas, chart, q) * (out.value + L) - Ld.d1(q, Q);
    out.d2 = scale * Q;
    return out;
  };
  return assemble(ctx, HamiltonianSide::Right, jet);
}

DiscreteHamiltonian build_left_hamiltonian(const DiscreteLagrangian& Ld,
                                           const ConformalAtlas& atlas, ChartId chart,
                                           const StepperConfig& inner) {
  inner.validate();
  atlas.chart(chart);
  auto ctx = std::make_shared<const HamiltonianContext>(
      HamiltonianContext{Ld, atlas, chart, inner});
  auto jet = [ctx](const Vec& Q, const Vec& p) -> HamiltonianJet {
    const auto& [Ld, atlas, chart, inner] = *ctx;
    const Vec q = left_inversion(Ld, atlas, chart, Q, p, inner);
    const double scale = std::exp(atlas.sigma(chart, Q) - atlas.sigma(chart, q));
    HamiltonianJet out;
    out.value = scale * (-p.dot(q) - Ld.value(q, Q));
    out.d1 = lee_form(atlas, chart, Q) * out.value - scale * Ld.d2(q, Q);
    out.d2 = -scale * q;
    return out;
  };
  return assemble(ctx, HamiltonianSide::Left, jet);
}

namespace {

void require_side(const DiscreteHamiltonian& Hd, HamiltonianSide side, const char* op) {
  if (Hd.side != side)
    throw InvalidArgument(std::string(op) + ": discrete Hamiltonian has the wrong side");
}

Vec stack(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

PhaseStepResult rd_step(const DiscreteHamiltonian& Hd, const Vec& q_curr,
                        const Vec& p_curr, const StepperConfig& cfg) {
  require_side(Hd, HamiltonianSide::Right, "rd_step");
  cfg.validate();
  auto F = [&](const Vec& p_next) -> Vec { return Hd.d1(q_curr, p_next) - p_curr; };
  const auto res = newton_solve(F, p_curr, cfg);
  return {Hd.d2(q_curr, res.x), res.x, res.iterations, res.residual};
}

PhaseStepResult ld_step(const DiscreteHamiltonian& Hd, const Vec& q_curr,
                        const Vec& p_curr, const StepperConfig& cfg) {
  require_side(Hd, HamiltonianSide::Left, "ld_step");
  cfg.validate();
  auto F = [&](const Vec& q_next) -> Vec { return q_curr + Hd.d2(q_next, p_curr); };
  const auto res = newton_solve(F, Hd.seed(q_curr, p_curr), cfg);
  return {res.x, -Hd.d1(res.x, p_curr), res.iterations, res.residual};
}

PhaseStepResult rdlch_step(const DiscreteHamiltonian& Hd, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q_curr, const Vec& p_curr,
                           const StepperConfig& cfg) {
  require_side(Hd, HamiltonianSide::Right, "rdlch_step");
  cfg.validate();
  const Eigen::Index n = q_curr.size();
  const double sq = atlas.sigma(chart, q_curr);
  const Vec phi = lee_form(atlas, chart, q_curr);
  auto F = [&](const Vec& x) -> Vec {
    const Vec Q = x.head(n);
    const Vec p_next = x.tail(n);
    const auto H = Hd.jet(q_curr, p_next);
    return stack(Q - std::exp(atlas.sigma(chart, Q) - sq) * H.d2,
                 p_curr - H.d1 + phi * H.value);
  };
  const auto res = newton_solve(F, stack(Hd.seed(q_curr, p_curr), p_curr), cfg);
  const Vec Q = res.x.head(n);
  atlas.require_in_domain(chart, Q);
  return {Q, res.x.tail(n), res.iterations, res.residual};
}

PhaseStepResult ldlch_step(const DiscreteHamiltonian& Hd, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q_curr, const Vec& p_curr,
                           const StepperConfig& cfg) {
  require_side(Hd, HamiltonianSide::Left, "ldlch_step");
  cfg.validate();
  const Eigen::Index n = q_curr.size();
  const double sq = atlas.sigma(chart, q_curr);
  auto F = [&](const Vec& x) -> Vec {
    const Vec Q = x.head(n);
    const Vec p_next = x.tail(n);
    const auto H = Hd.jet(Q, p_curr);
    const double sQ = atlas.sigma(chart, Q);
    const double back = std::exp(sq - sQ);
    const Vec P = back * (lee_form(atlas, chart, Q) * H.value - H.d1);
    return stack(q_curr + back * H.d2, p_next - P / back);
  };
  const auto res = newton_solve(F, stack(Hd.seed(q_curr, p_curr), p_curr), cfg);
  const Vec Q = res.x.head(n);
  atlas.require_in_domain(chart, Q);
  return {Q, res.x.tail(n), res.iterations, res.residual};
}

DiscreteTrajectory integrate_hamiltonian(const DiscreteLagrangian& Ld,
                                         const ConformalAtlas& atlas, ChartId start_chart,
                                         const Vec& q0, const Vec& p0, int N,
                                         const StepperConfig& cfg, HamiltonianScheme scheme,
                                         double core_margin) {
  if (N < 1) throw InvalidArgument("integrate_hamiltonian: N must be >= 1");
  if (q0.size() != Ld.n || p0.size() != Ld.n)
    throw InvalidArgument("integrate_hamiltonian: initial data must have length n");
  cfg.validate();
  const bool plain =
      scheme == HamiltonianScheme::Right || scheme == HamiltonianScheme::Left;
  const bool right =
      scheme == HamiltonianScheme::Right || scheme == HamiltonianScheme::RightConformal;
  const ConformalAtlas A = plain ? atlas.flattened() : atlas;
  A.require_in_domain(start_chart, q0);

  std::map<ChartId, DiscreteHamiltonian> cache;
  auto hamiltonian = [&](ChartId c) -> const DiscreteHamiltonian& {
    auto it = cache.find(c);
    if (it == cache.end())
      it = cache
               .emplace(c, right ? build_right_hamiltonian(Ld, A, c)
                                 : build_left_hamiltonian(Ld, A, c))
               .first;
    return it->second;
  };

  DiscreteTrajectory traj;
  traj.h = Ld.h;
  auto record = [&](int k, ChartId c, const Vec& q, const Vec& p) {
    const auto mp = make_momentum_pair(A, c, q, p);
    traj.points.push_back({k, c, q, mp.r, mp.p});
  };
  record(0, start_chart, q0, p0);

  ChartId chart = start_chart;
  Vec q = q0;
  Vec p = p0;
  for (int k = 1; k <= N; ++k) {
    PhaseStepResult step;
    try {
      const auto& Hd = hamiltonian(chart);
      switch (scheme) {
        case HamiltonianScheme::Right: step = rd_step(Hd, q, p, cfg); break;
        case HamiltonianScheme::Left: step = ld_step(Hd, q, p, cfg); break;
        case HamiltonianScheme::RightConformal:
          step = rdlch_step(Hd, A, chart, q, p, cfg);
          break;
        case HamiltonianScheme::LeftConformal:
          step = ldlch_step(Hd, A, chart, q, p, cfg);
          break;
      }
      A.require_in_domain(chart, step.q_next);
    } catch (const Error& e) {
      throw IntegrationError(e.what(), k, std::move(traj));
    }
    q = step.q_next;
    p = step.p_next;
    bool switched = false;
    if (auto next = choose_chart(A, chart, q, {}, core_margin)) {
      const auto moved = transition_apply(A, chart, *next, q, p, MomentumKind::P);
      chart = moved.chart;
      q = moved.q;
      p = moved.momentum;
      switched = true;
    }
    record(k, chart, q, p);
    traj.diagnostics.push_back({k, step.iterations, step.residual, switched});
  }
  return traj;
}

Vec initial_pair_from_momentum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                               ChartId chart, const Vec& q0, const Vec& p0,
                               const StepperConfig& cfg) {
  cfg.validate();
  const Vec phi = lee_form(atlas, chart, q0);
  auto F = [&](const Vec& x) -> Vec {
    return phi * Ld.value(q0, x) - Ld.d1(q0, x) - p0;
  };
  auto J = [&](const Vec& x) -> Mat {
    return phi * Ld.d2(q0, x).transpose() - Ld.d1d2(q0, x);
  };
  const Vec seed = q0 + linear_seed(Ld, q0, p0 + Ld.d1(q0, q0));
  const Vec q1 = newton_solve(F, seed, cfg, J).x;
  atlas.require_in_domain(chart, q1);
  return q1;
}

}  // namespace lcs
