#include <doctest.h>

#include "lcs/errors.hpp"
#include "lcs/numerics.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace lcs;
using testing::vec1;

TEST_CASE("newton finds sqrt 2") {
  StepperConfig cfg;
  const auto res = newton_solve([](const Vec& x) { return vec1(x[0] * x[0] - 2.0); }, vec1(1.0), cfg);
  CHECK(std::abs(res.x[0] - std::sqrt(2.0)) <= 1e-12);
  CHECK(res.residual <= cfg.tol);
}

TEST_CASE("newton converges quadratically on x^2 - 2") {
  StepperConfig cfg;
  const auto res = newton_solve([](const Vec& x) { return vec1(x[0] * x[0] - 2.0); }, vec1(1.0), cfg);
  const auto& r = res.residual_history;
  REQUIRE(r.size() >= 4);
  // e_{k+1} ~ e_k^2 / (2 sqrt 2); residuals scale the same way
  for (std::size_t k = 1; k + 1 < r.size() && r[k + 1] > 1e-15; ++k)
    CHECK(r[k + 1] <= r[k] * r[k]);
}

TEST_CASE("newton solves a linear residual in one iteration") {
  const double c = 3.25;
  const auto res = newton_solve([c](const Vec& x) { return vec1(x[0] - c); }, vec1(0.0), StepperConfig{},
                                [](const Vec&) { return Mat::Identity(1, 1); });
  CHECK(res.iterations == 1);
  CHECK(res.x[0] == doctest::Approx(c).epsilon(1e-15));
}

TEST_CASE("newton on x^3 reaches the triple root") {
  StepperConfig cfg;
  cfg.tol = 1e-10;
  const auto res = newton_solve([](const Vec& x) { return vec1(x[0] * x[0] * x[0]); }, vec1(1.0),
                                cfg, [](const Vec& x) { return Mat::Constant(1, 1, 3 * x[0] * x[0]); });
  // bisection on [-1, 1] brackets the only sign change at 0
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid > 0 ? hi : lo) = mid;
  }
  CHECK(std::abs(res.x[0] - 0.5 * (lo + hi)) <= std::cbrt(cfg.tol) * 1.01);
}

TEST_CASE("newton reports non-convergence and singular jacobians") {
  StepperConfig cfg;
  cfg.max_iter = 3;
  CHECK_THROWS_AS(newton_solve([](const Vec& x) { return vec1(std::atan(x[0]) + 1.0); }, vec1(0.0), cfg,
                               [](const Vec&) { return Mat::Constant(1, 1, 1e-3); }),
                  ConvergenceError);
  CHECK_THROWS_AS(newton_solve([](const Vec& x) { return vec1(x[0] * x[0] + 1.0); }, vec1(0.0),
                               StepperConfig{}),
                  SingularMatrixError);
}

TEST_CASE("stepper config validation") {
  StepperConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 1e-15;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("finite differences") {
  const double eps = 1e-5;
  const Vec x = testing::vec({0.3, -1.2, 2.0});
  const Vec g = fd_gradient([](const Vec& y) { return 0.5 * y.squaredNorm(); }, x, eps);
  CHECK((g - x).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(fd_gradient([](const Vec&) { return 4.0; }, x, eps).cwiseAbs().maxCoeff() == 0.0);
  const Vec s = fd_gradient([](const Vec& y) { return std::sin(y[0]); }, vec1(0.0), 1e-3);
  CHECK(std::abs(s[0] - 1.0) <= 1e-6);

  Mat M(2, 2);
  M << 1, 2, -3, 4;
  const Mat J = fd_jacobian([&](const Vec& y) { return Vec(M * y); }, testing::vec({1, 1}), eps);
  CHECK((J - M).cwiseAbs().maxCoeff() <= 1e-9);
  const Mat Js = fd_jacobian_scaled([&](const Vec& y) { return Vec(M * y); }, testing::vec({1e3, 1}), 1e-7);
  CHECK((Js - M).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("gauss-legendre quadrature") {
  CHECK(gauss_legendre([](double x) { return x * x; }, 0, 1, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(gauss_legendre([](double) { return 2.5; }, -1, 3, 1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(std::abs(gauss_legendre([](double x) { return std::sin(x); }, 0, std::numbers::pi, 5) - 2.0) <= 1e-6);
  CHECK_THROWS_AS(gauss_legendre([](double x) { return x; }, 0, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(gauss_legendre([](double x) { return x; }, 0, 1, 11), InvalidArgument);
}

TEST_CASE("gauss-legendre is exact up to degree 2 order - 1") {
  testing::Rng rng(7);
  for (int order = 1; order <= kMaxGaussOrder; ++order) {
    for (int deg = 0; deg <= 2 * order - 1; ++deg) {
      const double a = rng(-1, 0), b = rng(0.5, 1.5);
      const double exact = (std::pow(b, deg + 1) - std::pow(a, deg + 1)) / (deg + 1);
      const double got = gauss_legendre([deg](double x) { return std::pow(x, deg); }, a, b, order);
      CHECK(std::abs(got - exact) <= 1e-13);
    }
  }
}

TEST_CASE("nodes are ascending and weights sum to two") {
  for (int order = 1; order <= kMaxGaussOrder; ++order) {
    const auto x = gauss_legendre_nodes(order);
    const auto w = gauss_legendre_weights(order);
    REQUIRE(x.size() == static_cast<std::size_t>(order));
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += w[i];
      if (i) CHECK(x[i] > x[i - 1]);
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("linear solve and condition") {
  Mat A(2, 2);
  A << 2, 0, 0, 0.5;
  CHECK(condition_number(A) == doctest::Approx(4.0));
  const Vec x = solve_linear(A, testing::vec({2, 1}), 1e14);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
  Mat S = Mat::Ones(2, 2);
  CHECK(std::isinf(condition_number(S)));
  CHECK_THROWS_AS(solve_linear(S, testing::vec({1, 1}), 1e14), SingularMatrixError);
}
