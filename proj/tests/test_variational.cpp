#include <doctest.h>

#include "lcs/catalog.hpp"
#include "lcs/errors.hpp"
#include "lcs/variational.hpp"
#include "lcs/verification.hpp"
#include "support.hpp"

#include <cmath>

using namespace lcs;
using testing::vec;
using testing::vec1;

namespace {

// Root of 0.005 u^2 + u = e^{0.01}, written to avoid cancellation.
double conformal_free_velocity() {
  const double rhs = std::exp(0.01);
  return 2 * rhs / (1 + std::sqrt(1 + 4 * 0.005 * rhs));
}

}  // namespace

TEST_CASE("del step examples") {
  const StepperConfig cfg;
  CHECK(del_step(midpoint_rule(testing::free_particle(), 0.1), vec1(0), vec1(0.1), cfg).q_next[0] ==
        doctest::Approx(0.2).epsilon(1e-14));
  CHECK(del_step(midpoint_rule(testing::harmonic(), 0.1), vec1(1), vec1(1), cfg).q_next[0] ==
        doctest::Approx(9.925 / 10.025).epsilon(1e-13));

  const auto rest = del_step(midpoint_rule(testing::harmonic(), 0.1), vec1(0), vec1(0), cfg);
  CHECK(rest.q_next[0] == 0.0);
  CHECK(rest.iterations == 0);
}

TEST_CASE("dlcel step against the quadratic oracle") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const auto res = dlcel_step(Ld, testing::linear_atlas({0.1}), 0, vec1(0), vec1(0.1), StepperConfig{});
  const double q2 = 0.1 + 0.1 * conformal_free_velocity();
  CHECK(res.q_next[0] == doctest::Approx(q2).epsilon(1e-12));
  CHECK(res.q_next[0] == doctest::Approx(0.2005).epsilon(1e-5));
  CHECK(res.q_next[0] - 0.1 > 0.1);
}

TEST_CASE("dlcel with constant sigma equals del") {
  const auto model = make_system("harmonic_1d");
  const auto r = check_lagrangian_reduction(model, 0);
  CHECK(r.passed);
  CHECK(r.measured <= 1e-12);
}

TEST_CASE("dlcel step leaving the chart") {
  const auto model = make_system("free_rotor_circle");
  const auto Ld = midpoint_rule(model.lagrangian, 0.15);
  CHECK_THROWS_AS(dlcel_step(Ld, model.atlas, 1, vec1(3.8), vec1(3.9), StepperConfig{}), DomainError);
}

TEST_CASE("integrate without conformal factors equals sigma zero") {
  const auto Ld = midpoint_rule(testing::harmonic(), 0.1);
  const StepperConfig cfg;
  MarchOptions plain;
  plain.conformal = false;
  const auto a = integrate(Ld, testing::linear_atlas({0.4}), 0, vec1(1), vec1(0.99), 30, cfg, plain);
  const auto b = integrate(Ld, testing::linear_atlas({0.0}), 0, vec1(1), vec1(0.99), 30, cfg);
  REQUIRE(a.size() == 31);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.points[k].k == static_cast<int>(k));
    CHECK(a.points[k].q[0] == b.points[k].q[0]);
  }
}

TEST_CASE("harmonic energy does not drift") {
  const double h = 0.05;
  const auto Ld = midpoint_rule(testing::harmonic(), h);
  const Vec q1 = del_step(Ld, vec1(1), vec1(1), StepperConfig{}).q_next;  // any nearby start
  const auto traj = integrate(Ld, testing::linear_atlas({0.0}), 0, vec1(1), q1, 400, StepperConfig{});
  std::vector<double> e;
  for (const auto& pt : traj.points) e.push_back(0.5 * (*pt.p)[0] * (*pt.p)[0] + 0.5 * pt.q[0] * pt.q[0]);
  double worst = 0;
  for (double x : e) worst = std::max(worst, std::abs(x - e[0]));
  CHECK(worst <= h * h);
  CHECK(worst > 0);
  // period of the discrete rotation is about 2 pi / h steps; compare whole periods
  double first = 0, last = 0;
  const int period = 126;
  for (int k = 0; k < period; ++k) {
    first += e[k];
    last += e[e.size() - period + k];
  }
  CHECK(std::abs(first - last) / period <= 0.05 * h * h);
}

TEST_CASE("action sum") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const std::vector<Vec> qs = {vec1(0), vec1(0.1), vec1(0.2)};
  CHECK(action_sum(Ld, testing::linear_atlas({0.0}), 0, qs) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(action_sum(Ld, testing::linear_atlas({0.1}), 0, qs) ==
        doctest::Approx(0.05 * (1 + std::exp(-0.01))).epsilon(1e-15));
  const auto atlas = testing::linear_atlas({0.7});
  CHECK(action_sum(Ld, atlas, 0, {vec1(0.3), vec1(0.5)}) ==
        doctest::Approx(std::exp(-0.21) * Ld.value(vec1(0.3), vec1(0.5))).epsilon(1e-15));
}

TEST_CASE("dlcel trajectories make the action stationary") {
  const auto Ld = midpoint_rule(testing::harmonic(), 0.1);
  const auto atlas = testing::linear_atlas({0.1});
  const auto traj = integrate(Ld, atlas, 0, vec1(0.5), vec1(0.55), 100, StepperConfig{});
  CHECK(stationarity_residual(Ld, atlas, traj) <= 1e-8);

  std::vector<Vec> qs;
  for (const auto& pt : traj.points) qs.push_back(pt.q);
  qs[50][0] += 1e-3;
  CHECK(stationarity_residual(Ld, atlas, 0, qs) >= 1e-4);

  CHECK_THROWS_AS(stationarity_residual(Ld, atlas, 0, {vec1(0), vec1(1)}), InvalidArgument);
}

TEST_CASE("stationarity check over random trajectories") {
  const auto r = check_stationarity(make_system("harmonic_1d"), 42);
  CHECK(r.passed);
}

TEST_CASE("circle trajectory switches charts and keeps p continuous") {
  const auto circle = make_system("free_rotor_circle");
  const auto line = make_system("free_rotor_line");
  const double h = 0.05;
  const StepperConfig cfg;
  const auto a = integrate(midpoint_rule(circle.lagrangian, h), circle.atlas, 1, vec1(0.3), vec1(0.35), 160, cfg);
  const auto b = integrate(midpoint_rule(line.lagrangian, h), line.atlas, line.default_chart, vec1(0.3), vec1(0.35),
                           160, cfg);
  int switches = 0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    if (a.points[k].chart != a.points[k - 1].chart) ++switches;
    CHECK(std::abs((*a.points[k].p)[0] - (*b.points[k].p)[0]) <= 1e-10);
  }
  CHECK(switches >= 1);
  CHECK(check_globalization(circle).passed);
  CHECK(check_chart_independence(circle).passed);
}

TEST_CASE("marching failure reports the index and the partial trajectory") {
  ContinuousLagrangian L = testing::free_particle();
  const auto Ld = midpoint_rule(L, 0.1);
  StepperConfig cfg;
  cfg.max_iter = 1;
  // a strongly conformal start that Newton cannot finish in one iteration
  try {
    integrate(Ld, testing::linear_atlas({30.0}), 0, vec1(0), vec1(0.5), 10, cfg);
    FAIL("expected an integration error");
  } catch (const IntegrationError& e) {
    CHECK(e.failed_index() >= 2);
    CHECK(e.partial().size() == static_cast<std::size_t>(e.failed_index()));
  }
}
