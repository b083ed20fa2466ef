#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace lcs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;

/// Tolerances shared by every implicit stepper.
struct StepperConfig {
  double tol = 1e-12;          ///< residual bound, infinity norm
  int max_iter = 50;
  int damping_halvings = 6;    ///< backtracking halvings per Newton step
  double fd_epsilon = 1e-6;    ///< relative step of finite-difference Jacobians

  /// Throws InvalidArgument unless every field is positive and tol >= 1e-14.
  void validate() const;
};

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  ///< ||F|| before each iteration, then final
};

/// Largest condition number accepted by newton_solve before it reports a
/// singular Jacobian.
inline constexpr double kNewtonMaxCondition = 1e14;

/// Damped Newton iteration on F(x) = 0 with an infinity-norm stopping rule.
///
/// Uses `jacobian` when supplied, central finite differences otherwise. A
/// step whose residual does not decrease is halved up to
/// cfg.damping_halvings times. Throws ConvergenceError after cfg.max_iter
/// iterations and SingularMatrixError when the Jacobian condition exceeds
/// kNewtonMaxCondition.
NewtonResult newton_solve(const VectorFn& F, const Vec& x0,
                          const StepperConfig& cfg,
                          const MatrixFn& jacobian = {});

/// Central-difference gradient with absolute step eps.
Vec fd_gradient(const ScalarFn& f, const Vec& x, double eps);

/// Central-difference Jacobian with absolute step eps; column j is dF/dx_j.
Mat fd_jacobian(const VectorFn& F, const Vec& x, double eps);

/// Central-difference Jacobian whose step for coordinate j is
/// rel_eps * max(1, |x_j|).
Mat fd_jacobian_scaled(const VectorFn& F, const Vec& x, double rel_eps);

inline constexpr int kMaxGaussOrder = 10;

/// Nodes on [-1, 1] of the order-point Gauss-Legendre rule, ascending.
std::span<const double> gauss_legendre_nodes(int order);
std::span<const double> gauss_legendre_weights(int order);

/// Gauss-Legendre quadrature of f over [a, b], 1 <= order <= 10.
double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int order);

/// 2-norm condition number (ratio of extreme singular values); infinity
/// for a singular matrix.
double condition_number(const Mat& A);

/// Solves A x = b by LU with partial pivoting; throws SingularMatrixError
/// when the condition estimate exceeds max_condition.
Vec solve_linear(const Mat& A, const Vec& b, double max_condition);

inline double inf_norm(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace lcs
