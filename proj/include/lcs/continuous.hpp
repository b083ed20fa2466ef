#pragma once

#include "lcs/atlas.hpp"
#include "lcs/numerics.hpp"

#include <functional>
#include <vector>

namespace lcs {

using PhaseScalarFn = std::function<double(const Vec&, const Vec&)>;
using PhaseVectorFn = std::function<Vec(const Vec&, const Vec&)>;
using PhaseMatrixFn = std::function<Mat(const Vec&, const Vec&)>;

/// Global Lagrangian L|_alpha = e^{sigma_alpha} L_alpha as a function of (q, v).
///
/// hess_vq(i, j) is d^2 L / dv_i dq_j. hess_qq is only needed by the
/// quadrature discretizations; when empty it is approximated by central
/// differences of grad_q.
struct ContinuousLagrangian {
  int n = 1;
  PhaseScalarFn value;
  PhaseVectorFn grad_q;
  PhaseVectorFn grad_v;
  PhaseMatrixFn hess_vv;
  PhaseMatrixFn hess_vq;
  PhaseMatrixFn hess_qq;

  Mat hessian_qq(const Vec& q, const Vec& v) const;
};

/// Global Hamiltonian H|_alpha = e^{sigma_alpha} H_alpha as a function of (q, p).
struct ContinuousHamiltonian {
  int n = 1;
  PhaseScalarFn value;
  PhaseVectorFn grad_q;
  PhaseVectorFn grad_p;
};

struct PhaseState {
  ChartId chart = 0;
  Vec q;
  Vec p;
  double t = 0.0;
};

struct PhaseVelocity {
  Vec dq;
  Vec dp;
};

/// Right-hand side of the LCS Hamilton equations in Darboux coordinates:
///   dq/dt = dH/dp,  dp/dt = -dH/dq - A dH/dp + H phi.
PhaseVelocity lcs_hamiltonian_field(const ContinuousHamiltonian& H,
                                    const ConformalAtlas& atlas, ChartId chart,
                                    const Vec& q, const Vec& p);

/// Largest velocity-Hessian condition number accepted by lcel_acceleration.
inline constexpr double kMaxHessianCondition = 1e12;

/// Acceleration solving the locally conformal Euler-Lagrange equations
///   d/dt(dL/dv) - dL/dq = (phi . v) dL/dv - phi L
/// for L = L|_alpha. Throws RegularityError when the velocity Hessian is
/// singular or worse conditioned than kMaxHessianCondition.
Vec lcel_acceleration(const ContinuousLagrangian& L, const ConformalAtlas& atlas,
                      ChartId chart, const Vec& q, const Vec& v);

/// v . dL/dv - L, which is e^{sigma} E_{L_alpha} for L = L|_alpha.
double energy(const ContinuousLagrangian& L, const ConformalAtlas& atlas, ChartId chart,
              const Vec& q, const Vec& v);

/// p = dL|_alpha / dv.
Vec fiber_legendre(const ContinuousLagrangian& L, const Vec& q, const Vec& v);

/// Velocity v with dL/dv(q, v) = p, by Newton iteration seeded at v_seed
/// (or p when v_seed is empty).
Vec fiber_legendre_inv(const ContinuousLagrangian& L, const Vec& q, const Vec& p,
                       const StepperConfig& cfg = {}, const Vec& v_seed = Vec());

/// Classical fixed-step fourth-order Runge-Kutta. Returns steps + 1 states,
/// the first being x0. Throws NumericalError naming the step index when a
/// state becomes non-finite.
std::vector<Vec> rk4_integrate(const VectorFn& field, const Vec& x0, double h,
                               int steps);

/// One classical RK4 step.
Vec rk4_step(const VectorFn& field, const Vec& x, double h);

/// Sum of central-difference diagonal partials of a vector field.
double divergence_numeric(const VectorFn& field, const Vec& x, double eps);

/// (q, p) -> (dq/dt, dp/dt) of the LCS Hamilton equations on one chart.
VectorFn lcs_hamiltonian_phase_field(ContinuousHamiltonian H, ConformalAtlas atlas,
                                     ChartId chart);

/// (q, v) -> (v, acceleration) of the locally conformal Euler-Lagrange equations.
VectorFn lcel_phase_field(ContinuousLagrangian L, ConformalAtlas atlas, ChartId chart);

}  // namespace lcs
