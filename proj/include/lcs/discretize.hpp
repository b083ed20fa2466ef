#pragma once

#include "lcs/atlas.hpp"
#include "lcs/continuous.hpp"

namespace lcs {

using PairScalarFn = std::function<double(const Vec&, const Vec&)>;
using PairVectorFn = std::function<Vec(const Vec&, const Vec&)>;
using PairMatrixFn = std::function<Mat(const Vec&, const Vec&)>;

/// Two-point function L^d|(q_k, q_{k+1}) approximating the action of the
/// global Lagrangian over one step of length h, with its partials.
///
/// The local discrete Lagrangian of a chart is e^{-sigma(q_k)} L^d| and is
/// formed by the consumers (steppers, Legendre transforms, action sums).
struct DiscreteLagrangian {
  int n = 1;
  double h = 0.0;
  PairScalarFn value;
  PairVectorFn d1;    ///< D_1 L^d, gradient in q_k
  PairVectorFn d2;    ///< D_2 L^d, gradient in q_{k+1}
  PairMatrixFn d1d2;  ///< (i, j) = d^2 L^d / dq_k^i dq_{k+1}^j
};

/// L^d(q0, q1) = h L((q0 + q1) / 2, (q1 - q0) / h).
DiscreteLagrangian midpoint_rule(const ContinuousLagrangian& L, double h);

/// L^d(q0, q1) = h/2 [L(q0, v) + L(q1, v)], v = (q1 - q0) / h.
DiscreteLagrangian trapezoidal_rule(const ContinuousLagrangian& L, double h);

struct ExactLagrangianOptions {
  int quad_order = 5;
  double bvp_tol = 1e-10;
  int substeps = 64;         ///< RK4 steps per interval of length h
  double fd_epsilon = 1e-5;  ///< relative step of the finite-difference partials
};

/// Action of L along the extremal of the locally conformal Euler-Lagrange
/// equations joining q0 to q1 in time h. The extremal is found by single
/// shooting on the initial velocity; the integral by Gauss-Legendre
/// quadrature. Partials are central finite differences of the value.
/// Throws ConvergenceError carrying the endpoint residual when shooting fails.
DiscreteLagrangian exact_discrete_lagrangian(const ContinuousLagrangian& L,
                                             const ConformalAtlas& atlas, ChartId chart,
                                             double h,
                                             const ExactLagrangianOptions& opts = {});

/// Initial velocity of the extremal joining q0 to q1 in time h.
Vec shoot_initial_velocity(const ContinuousLagrangian& L, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q0, const Vec& q1, double h,
                           const ExactLagrangianOptions& opts = {});

}  // namespace lcs
