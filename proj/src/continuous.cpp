#include "lcs/continuous.hpp"

#include "lcs/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lcs {

Mat ContinuousLagrangian::hessian_qq(const Vec& q, const Vec& v) const {
  if (hess_qq) return hess_qq(q, v);
  return fd_jacobian([&](const Vec& x) { return grad_q(x, v); }, q, 1e-5);
}

PhaseVelocity lcs_hamiltonian_field(const ContinuousHamiltonian& H,
                                    const ConformalAtlas& atlas, ChartId chart,
                                    const Vec& q, const Vec& p) {
  const Vec phi = lee_form(atlas, chart, q);
  const Vec Hp = H.grad_p(q, p);
  PhaseVelocity out;
  out.dq = Hp;
  out.dp = -H.grad_q(q, p) - a_matrix(phi, p) * Hp + H.value(q, p) * phi;
  return out;
}

Vec lcel_acceleration(const ContinuousLagrangian& L, const ConformalAtlas& atlas,
                      ChartId chart, const Vec& q, const Vec& v) {
  const Vec phi = lee_form(atlas, chart, q);
  const Vec rhs = L.grad_q(q, v) - L.hess_vq(q, v) * v +
                  phi.dot(v) * L.grad_v(q, v) - L.value(q, v) * phi;
  const Mat M = L.hess_vv(q, v);
  Eigen::PartialPivLU<Mat> lu(M);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxHessianCondition))
    throw RegularityError("velocity Hessian of the Lagrangian is singular", cond);
  return lu.solve(rhs);
}

double energy(const ContinuousLagrangian& L, const ConformalAtlas& atlas, ChartId chart,
              const Vec& q, const Vec& v) {
  atlas.require_in_domain(chart, q);
  return v.dot(L.grad_v(q, v)) - L.value(q, v);
}

Vec fiber_legendre(const ContinuousLagrangian& L, const Vec& q, const Vec& v) {
  return L.grad_v(q, v);
}

Vec fiber_legendre_inv(const ContinuousLagrangian& L, const Vec& q, const Vec& p,
                       const StepperConfig& cfg, const Vec& v_seed) {
  const Vec seed = v_seed.size() == p.size() ? v_seed : p;
  auto residual = [&](const Vec& v) -> Vec { return L.grad_v(q, v) - p; };
  auto jacobian = [&](const Vec& v) -> Mat { return L.hess_vv(q, v); };
  return newton_solve(residual, seed, cfg, jacobian).x;
}

Vec rk4_step(const VectorFn& field, const Vec& x, double h) {
  const Vec k1 = field(x);
  const Vec k2 = field(x + 0.5 * h * k1);
  const Vec k3 = field(x + 0.5 * h * k2);
  const Vec k4 = field(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vec> rk4_integrate(const VectorFn& field, const Vec& x0, double h,
                               int steps) {
  if (!(h > 0.0)) throw InvalidArgument("rk4_integrate: h must be positive");
  if (steps < 1) throw InvalidArgument("rk4_integrate: steps must be >= 1");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(x0);
  for (int k = 0; k < steps; ++k) {
    Vec next = rk4_step(field, out.back(), h);
    if (!next.allFinite())
      throw NumericalError("rk4_integrate: non-finite state at step " +
                           std::to_string(k + 1));
    out.push_back(std::move(next));
  }
  return out;
}

double divergence_numeric(const VectorFn& field, const Vec& x, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("divergence_numeric: eps must be positive");
  double div = 0.0;
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + eps;
    const double fp = field(xp)[i];
    xp[i] = x[i] - eps;
    const double fm = field(xp)[i];
    xp[i] = x[i];
    div += (fp - fm) / (2.0 * eps);
  }
  return div;
}

VectorFn lcs_hamiltonian_phase_field(ContinuousHamiltonian H, ConformalAtlas atlas,
                                     ChartId chart) {
  return [H = std::move(H), atlas = std::move(atlas), chart](const Vec& x) -> Vec {
    const Eigen::Index n = x.size() / 2;
    const auto f = lcs_hamiltonian_field(H, atlas, chart, x.head(n), x.tail(n));
    Vec out(2 * n);
    out << f.dq, f.dp;
    return out;
  };
}

VectorFn lcel_phase_field(ContinuousLagrangian L, ConformalAtlas atlas, ChartId chart) {
  return [L = std::move(L), atlas = std::move(atlas), chart](const Vec& x) -> Vec {
    const Eigen::Index n = x.size() / 2;
    const Vec q = x.head(n);
    const Vec v = x.tail(n);
    Vec out(2 * n);
    out << v, lcel_acceleration(L, atlas, chart, q, v);
    return out;
  };
}

}  // namespace lcs
