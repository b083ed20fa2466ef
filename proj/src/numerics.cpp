#include "lcs/numerics.hpp"

#include "lcs/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace lcs {

void StepperConfig::validate() const {
  if (!(tol >= 1e-14)) throw InvalidArgument("StepperConfig.tol must be >= 1e-14");
  if (max_iter <= 0) throw InvalidArgument("StepperConfig.max_iter must be positive");
  if (damping_halvings <= 0)
    throw InvalidArgument("StepperConfig.damping_halvings must be positive");
  if (!(fd_epsilon > 0.0)) throw InvalidArgument("StepperConfig.fd_epsilon must be positive");
}

NewtonResult newton_solve(const VectorFn& F, const Vec& x0,
                          const StepperConfig& cfg, const MatrixFn& jacobian) {
  NewtonResult out;
  out.x = x0;
  Vec r = F(out.x);
  if (r.size() != x0.size())
    throw InvalidArgument("newton_solve: residual and unknown sizes differ");
  double res = inf_norm(r);
  if (!std::isfinite(res))
    throw NumericalError("newton_solve: residual not finite at the seed");
  out.residual_history.push_back(res);

  while (res > cfg.tol) {
    if (out.iterations >= cfg.max_iter)
      throw ConvergenceError("Newton iteration did not converge", res,
                             out.iterations);
    const Mat J = jacobian ? jacobian(out.x)
                           : fd_jacobian_scaled(F, out.x, cfg.fd_epsilon);
    const double cond = condition_number(J);
    if (!(cond <= kNewtonMaxCondition))
      throw SingularMatrixError("Newton Jacobian is singular", cond);
    const Vec dx = J.partialPivLu().solve(-r);

    double lambda = 1.0;
    Vec x_try = out.x + dx;
    Vec r_try = F(x_try);
    double res_try = inf_norm(r_try);
    for (int halving = 0;
         halving < cfg.damping_halvings && !(res_try < res); ++halving) {
      lambda *= 0.5;
      x_try = out.x + lambda * dx;
      r_try = F(x_try);
      res_try = inf_norm(r_try);
    }
    if (!std::isfinite(res_try))
      throw ConvergenceError("Newton iterate left the region where F is finite",
                             res, out.iterations);
    out.x = std::move(x_try);
    r = std::move(r_try);
    res = res_try;
    ++out.iterations;
    out.residual_history.push_back(res);
  }
  out.residual = res;
  return out;
}

Vec fd_gradient(const ScalarFn& f, const Vec& x, double eps) {
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + eps;
    const double fp = f(xp);
    xp[j] = x[j] - eps;
    const double fm = f(xp);
    xp[j] = x[j];
    g[j] = (fp - fm) / (2.0 * eps);
  }
  return g;
}

Mat fd_jacobian(const VectorFn& F, const Vec& x, double eps) {
  Mat J;
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + eps;
    const Vec fp = F(xp);
    xp[j] = x[j] - eps;
    const Vec fm = F(xp);
    xp[j] = x[j];
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * eps);
  }
  return J;
}

Mat fd_jacobian_scaled(const VectorFn& F, const Vec& x, double rel_eps) {
  Mat J;
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = rel_eps * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    const Vec fp = F(xp);
    xp[j] = x[j] - step;
    const Vec fm = F(xp);
    xp[j] = x[j];
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

namespace {

struct GaussRule {
  std::array<double, kMaxGaussOrder> nodes{};
  std::array<double, kMaxGaussOrder> weights{};
};

// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double pn = p1;
  const double pnm1 = n == 1 ? 1.0 : p0;
  return {pn, n * (x * pn - pnm1) / (x * x - 1.0)};
}

GaussRule compute_rule(int n) {
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dp] = legendre_with_derivative(n, x);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const std::array<GaussRule, kMaxGaussOrder>& gauss_table() {
  static const std::array<GaussRule, kMaxGaussOrder> table = [] {
    std::array<GaussRule, kMaxGaussOrder> t{};
    for (int n = 1; n <= kMaxGaussOrder; ++n) t[n - 1] = compute_rule(n);
    return t;
  }();
  return table;
}

void check_order(int order) {
  if (order < 1 || order > kMaxGaussOrder)
    throw InvalidArgument("Gauss-Legendre order must be in [1, 10], got " +
                          std::to_string(order));
}

}  // namespace

std::span<const double> gauss_legendre_nodes(int order) {
  check_order(order);
  return {gauss_table()[order - 1].nodes.data(), static_cast<std::size_t>(order)};
}

std::span<const double> gauss_legendre_weights(int order) {
  check_order(order);
  return {gauss_table()[order - 1].weights.data(),
          static_cast<std::size_t>(order)};
}

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int order) {
  check_order(order);
  if (!(a < b)) throw InvalidArgument("gauss_legendre requires a < b");
  const auto nodes = gauss_legendre_nodes(order);
  const auto weights = gauss_legendre_weights(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

double condition_number(const Mat& A) {
  if (A.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

Vec solve_linear(const Mat& A, const Vec& b, double max_condition) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw InvalidArgument("solve_linear: dimension mismatch");
  Eigen::PartialPivLU<Mat> lu(A);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond
                                  : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition))
    throw SingularMatrixError("linear system is singular", cond);
  return lu.solve(b);
}

}  // namespace lcs
