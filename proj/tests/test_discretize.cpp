#include <doctest.h>

#include "lcs/catalog.hpp"
#include "lcs/discretize.hpp"
#include "lcs/errors.hpp"
#include "lcs/verification.hpp"
#include "support.hpp"

#include <cmath>

using namespace lcs;
using testing::vec;
using testing::vec1;

TEST_CASE("midpoint rule values") {
  const auto free = midpoint_rule(testing::free_particle(), 0.1);
  CHECK(free.value(vec1(0), vec1(0.1)) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(free.d2(vec1(0), vec1(0.1))[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto harm = midpoint_rule(testing::harmonic(), 0.1);
  CHECK(harm.value(vec1(1), vec1(1)) == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("trapezoidal rule values") {
  const auto free = trapezoidal_rule(testing::free_particle(), 0.1);
  CHECK(free.value(vec1(0), vec1(0.1)) == doctest::Approx(0.05).epsilon(1e-15));

  ContinuousLagrangian pot = testing::harmonic();
  pot.value = [](const Vec& q, const Vec&) { return -0.5 * q.squaredNorm(); };
  const auto trap = trapezoidal_rule(pot, 1.0);
  CHECK(trap.value(vec1(0), vec1(2)) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("free particle mixed partial is -I/h") {
  const double h = 0.1;
  for (const auto& Ld : {midpoint_rule(testing::free_particle(2), h), trapezoidal_rule(testing::free_particle(2), h)}) {
    const Mat M = Ld.d1d2(vec({0.3, -1}), vec({0.5, 2}));
    CHECK((M + Mat::Identity(2, 2) / h).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("harmonic midpoint mixed partial") {
  const double h = 0.1;
  // d/dq0 d/dq1 of h[(q1-q0)^2/(2h^2) - (q0+q1)^2/8]
  CHECK(midpoint_rule(testing::harmonic(), h).d1d2(vec1(1), vec1(1))(0, 0) ==
        doctest::Approx(-1 / h - h / 4).epsilon(1e-14));
}

namespace {

void check_partials(const DiscreteLagrangian& Ld, unsigned seed, int samples, double rel) {
  testing::Rng rng(seed);
  const int n = Ld.n;
  for (int i = 0; i < samples; ++i) {
    const Vec q0 = rng.vec(n), q1 = q0 + Ld.h * rng.vec(n);
    const Vec g1 = fd_gradient([&](const Vec& x) { return Ld.value(x, q1); }, q0, 1e-6);
    const Vec g2 = fd_gradient([&](const Vec& x) { return Ld.value(q0, x); }, q1, 1e-6);
    const Mat m = fd_jacobian([&](const Vec& x) { return Ld.d2(x, q1); }, q0, 1e-6);
    const Vec d1 = Ld.d1(q0, q1), d2 = Ld.d2(q0, q1);
    const Mat mixed = Ld.d1d2(q0, q1);
    const double scale = std::max({1.0, inf_norm(d1), inf_norm(d2), mixed.cwiseAbs().maxCoeff()});
    CHECK(inf_norm(d1 - g1) <= rel * scale);
    CHECK(inf_norm(d2 - g2) <= rel * scale);
    CHECK((mixed - m).cwiseAbs().maxCoeff() <= rel * scale);
  }
}

}  // namespace

TEST_CASE("analytic partials match finite differences") {
  for (const char* name : {"harmonic_1d", "planar_2d"}) {
    const auto model = make_system(name);
    check_partials(midpoint_rule(model.lagrangian, 0.1), 1, 100, 1e-6);
    check_partials(trapezoidal_rule(model.lagrangian, 0.1), 2, 100, 1e-6);
  }
}

TEST_CASE("exact discrete lagrangian of a free particle") {
  const double h = 0.1;
  const auto Ld = exact_discrete_lagrangian(testing::free_particle(), testing::linear_atlas({0.0}), 0, h);
  for (auto [a, b] : {std::pair{0.0, 0.1}, {1.0, 0.7}, {-0.3, -0.2}}) {
    const double expected = (b - a) * (b - a) / (2 * h);
    CHECK(std::abs(Ld.value(vec1(a), vec1(b)) - expected) <= 1e-12);
  }
}

TEST_CASE("exact discrete lagrangian of the harmonic oscillator") {
  const auto Ld = exact_discrete_lagrangian(testing::harmonic(), testing::linear_atlas({0.0}), 0, 0.1);
  testing::Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const double q0 = rng(), q1 = q0 + 0.1 * rng();
    for (double h : {0.1}) {
      const double closed = ((q0 * q0 + q1 * q1) * std::cos(h) - 2 * q0 * q1) / (2 * std::sin(h));
      CHECK(std::abs(Ld.value(vec1(q0), vec1(q1)) - closed) <= 1e-9);
    }
  }
  CHECK(Ld.value(vec1(1), vec1(1)) == doctest::Approx(-std::tan(0.05)).epsilon(1e-9));
}

TEST_CASE("exact discrete lagrangian partials against the closed form") {
  const double h = 0.1;
  const auto Ld = exact_discrete_lagrangian(testing::harmonic(), testing::linear_atlas({0.0}), 0, h);
  const double q0 = 0.4, q1 = 0.45;
  // d/dq0 and d/dq1 of [(q0^2 + q1^2) cos h - 2 q0 q1] / (2 sin h)
  CHECK(Ld.d1(vec1(q0), vec1(q1))[0] == doctest::Approx((q0 * std::cos(h) - q1) / std::sin(h)).epsilon(1e-6));
  CHECK(Ld.d2(vec1(q0), vec1(q1))[0] == doctest::Approx((q1 * std::cos(h) - q0) / std::sin(h)).epsilon(1e-6));
  CHECK(Ld.d1d2(vec1(q0), vec1(q1))(0, 0) == doctest::Approx(-1 / std::sin(h)).epsilon(1e-4));
}

TEST_CASE("shooting failure is reported") {
  // q'' = 4 q^3 blows up in finite time along every fast extremal
  ContinuousLagrangian quartic = testing::free_particle();
  quartic.value = [](const Vec& q, const Vec& v) { return 0.5 * v.squaredNorm() + std::pow(q[0], 4); };
  quartic.grad_q = [](const Vec& q, const Vec&) { return vec1(4 * std::pow(q[0], 3)); };
  quartic.hess_qq = [](const Vec& q, const Vec&) { return Mat::Constant(1, 1, 12 * q[0] * q[0]); };
  CHECK_THROWS_AS(shoot_initial_velocity(quartic, testing::linear_atlas({0.0}), 0, vec1(0), vec1(20), 1.0),
                  ConvergenceError);
}

TEST_CASE("midpoint approaches the exact discrete lagrangian at third order") {
  const auto r = check_exact_lagrangian(0, 10, 6.0);
  CHECK(r.passed);
  CHECK(r.measured >= 6.0);
}
