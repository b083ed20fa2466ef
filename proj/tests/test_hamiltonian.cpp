#include <doctest.h>

#include "lcs/catalog.hpp"
#include "lcs/errors.hpp"
#include "lcs/hamiltonian_discrete.hpp"
#include "lcs/verification.hpp"
#include "support.hpp"

#include <cmath>

using namespace lcs;
using testing::vec;
using testing::vec1;

TEST_CASE("discrete legendre transforms") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const auto flat = discrete_legendre(Ld, testing::linear_atlas({0.0}), 0, vec1(0), vec1(0.1));
  CHECK(flat.p_plus[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(flat.p_minus[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(flat.r_plus == flat.p_plus);

  const auto conf = discrete_legendre(Ld, testing::linear_atlas({0.1}), 0, vec1(0), vec1(0.1));
  CHECK(conf.p_minus[0] == doctest::Approx(0.1 * 0.05 + 1.0).epsilon(1e-15));
  CHECK(conf.r_minus[0] == doctest::Approx(1.005).epsilon(1e-15));

  const auto off = discrete_legendre(Ld, testing::linear_atlas({0.1}), 0, vec1(2), vec1(2.1));
  CHECK(off.r_plus[0] == doctest::Approx(std::exp(-0.2) * off.p_plus[0]).epsilon(1e-15));
}

TEST_CASE("momenta along a solution") {
  const auto Ld = midpoint_rule(testing::harmonic(), 0.1);
  const auto atlas = testing::linear_atlas({0.0});
  MarchOptions opts;
  opts.fill_momenta = false;
  auto traj = integrate(Ld, atlas, 0, vec1(1), vec1(0.98), 20, StepperConfig{}, opts);
  momenta_along_trajectory(Ld, atlas, traj, 1e-10);
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Vec& q = traj.points[k].q;
    const double plus = Ld.d2(traj.points[k - 1].q, q)[0];
    const double minus = -Ld.d1(q, traj.points[k + 1].q)[0];
    CHECK(std::abs((*traj.points[k].p)[0] - plus) <= 1e-10);
    CHECK(std::abs((*traj.points[k].p)[0] - minus) <= 1e-10);
  }
}

TEST_CASE("r and p are related by the conformal factor") {
  const auto Ld = midpoint_rule(testing::harmonic(), 0.1);
  const auto atlas = testing::linear_atlas({0.3});
  const auto traj = integrate(Ld, atlas, 0, vec1(1), vec1(0.98), 40, StepperConfig{});
  for (const auto& pt : traj.points)
    CHECK(std::abs((*pt.r)[0] - std::exp(-0.3 * pt.q[0]) * (*pt.p)[0]) <= 1e-12);
}

TEST_CASE("momenta of a non-solution") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  DiscreteTrajectory traj;
  traj.h = 0.1;
  for (int k = 0; k < 3; ++k) traj.points.push_back({k, 0, vec1(std::vector{0.0, 0.1, 0.3}[k]), {}, {}});
  try {
    momenta_along_trajectory(Ld, testing::linear_atlas({0.0}), traj, 1e-10);
    FAIL("expected a consistency error");
  } catch (const ConsistencyError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("free particle discrete hamiltonians") {
  const double h = 0.1;
  const auto Ld = midpoint_rule(testing::free_particle(), h);
  const auto atlas = testing::linear_atlas({0.0});
  const auto Hr = build_right_hamiltonian(Ld, atlas, 0);
  const auto Hl = build_left_hamiltonian(Ld, atlas, 0);
  testing::Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const double q = rng(), p = rng();
    CHECK(Hr.value(vec1(q), vec1(p)) == doctest::Approx(p * q + h * p * p / 2).epsilon(1e-12));
    CHECK(Hl.value(vec1(q), vec1(p)) == doctest::Approx(-p * q + h * p * p / 2).epsilon(1e-12));
    CHECK(Hr.d1(vec1(q), vec1(p))[0] == doctest::Approx(p).epsilon(1e-10));
    CHECK(Hr.d2(vec1(q), vec1(p))[0] == doctest::Approx(q + h * p).epsilon(1e-10));
    CHECK(Hl.d1(vec1(q), vec1(p))[0] == doctest::Approx(-p).epsilon(1e-10));
    CHECK(Hl.d2(vec1(q), vec1(p))[0] == doctest::Approx(-q + h * p).epsilon(1e-10));
  }
}

TEST_CASE("lagrangian-derived hamiltonian partials match differences") {
  // with sigma present the partials hold the p <-> r factor fixed, which
  // plain differences of the value do not; the conformal case is covered
  // by the commutation tests
  const auto model = make_system("planar_2d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  const auto flat = model.atlas.flattened();
  testing::Rng rng(8);
  for (const auto& Hd : {build_right_hamiltonian(Ld, flat, 0), build_left_hamiltonian(Ld, flat, 0)}) {
    CHECK(Hd.provenance == HamiltonianProvenance::FromLagrangian);
    for (int i = 0; i < 10; ++i) {
      const Vec a = rng.vec(2), b = rng.vec(2);
      const Vec g1 = fd_gradient([&](const Vec& x) { return Hd.value(x, b); }, a, 1e-5);
      const Vec g2 = fd_gradient([&](const Vec& x) { return Hd.value(a, x); }, b, 1e-5);
      CHECK(inf_norm(Hd.d1(a, b) - g1) <= 1e-8);
      CHECK(inf_norm(Hd.d2(a, b) - g2) <= 1e-8);
      const auto jet = Hd.jet(a, b);
      CHECK(jet.value == Hd.value(a, b));
    }
  }
}

TEST_CASE("inversion round trip") {
  const auto model = make_system("harmonic_1d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  const StepperConfig inner{1e-14, 50, 6, 1e-6};
  const Vec q = vec1(0.4), p = vec1(-0.7);
  const Vec Q = right_inversion(Ld, model.atlas, 0, q, p, inner);
  const double sq = model.atlas.sigma(0, q), sQ = model.atlas.sigma(0, Q);
  CHECK(std::abs(std::exp(sQ - sq) * Ld.d2(q, Q)[0] - p[0]) <= 1e-13);

  const Vec q0 = left_inversion(Ld, model.atlas, 0, Q, p, inner);
  const Vec phi = lee_form(model.atlas, 0, q0);
  CHECK(std::abs(phi[0] * Ld.value(q0, Q) - Ld.d1(q0, Q)[0] - p[0]) <= 1e-13);
}

TEST_CASE("plain hamiltonian steps of a free particle") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const auto atlas = testing::linear_atlas({0.0});
  const StepperConfig cfg;
  const auto r = rd_step(build_right_hamiltonian(Ld, atlas, 0), vec1(0), vec1(1), cfg);
  CHECK(r.q_next[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.p_next[0] == doctest::Approx(1.0).epsilon(1e-12));
  const auto l = ld_step(build_left_hamiltonian(Ld, atlas, 0), vec1(0), vec1(1), cfg);
  CHECK(l.q_next[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(l.p_next[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hamiltonian fixed points") {
  const auto Ld = midpoint_rule(testing::harmonic(), 0.1);
  const auto atlas = testing::linear_atlas({0.0});
  const StepperConfig cfg;
  const auto r = rd_step(build_right_hamiltonian(Ld, atlas, 0), vec1(0), vec1(0), cfg);
  CHECK(std::abs(r.q_next[0]) <= 1e-14);
  CHECK(std::abs(r.p_next[0]) <= 1e-14);
  const auto l = ld_step(build_left_hamiltonian(Ld, atlas, 0), vec1(0), vec1(0), cfg);
  CHECK(std::abs(l.q_next[0]) <= 1e-14);
  CHECK(std::abs(l.p_next[0]) <= 1e-14);
}

TEST_CASE("conformal hamiltonian steps reproduce the dlcel example") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const auto atlas = testing::linear_atlas({0.1});
  const StepperConfig cfg;
  auto traj = integrate(Ld, atlas, 0, vec1(0), vec1(0.1), 2, cfg);
  const double rhs = std::exp(0.01);
  const double q2 = 0.1 + 0.1 * 2 * rhs / (1 + std::sqrt(1 + 0.02 * rhs));
  REQUIRE(traj.points[2].q[0] == doctest::Approx(q2).epsilon(1e-12));
  const Vec p1 = *traj.points[1].p;

  const auto r = rdlch_step(build_right_hamiltonian(Ld, atlas, 0), atlas, 0, vec1(0.1), p1, cfg);
  CHECK(r.q_next[0] == doctest::Approx(q2).epsilon(1e-11));
  const auto l = ldlch_step(build_left_hamiltonian(Ld, atlas, 0), atlas, 0, vec1(0.1), p1, cfg);
  CHECK(l.q_next[0] == doctest::Approx(q2).epsilon(1e-11));
  CHECK(l.p_next[0] == doctest::Approx((*traj.points[2].p)[0]).epsilon(1e-10));

  const auto r0 = rdlch_step(build_right_hamiltonian(Ld, atlas, 0), atlas, 0, vec1(0), *traj.points[0].p, cfg);
  CHECK(r0.q_next[0] == doctest::Approx(0.1).epsilon(1e-11));
}

TEST_CASE("conformal hamiltonian steps reduce to the plain ones") {
  const auto r = check_hamiltonian_reduction(make_system("harmonic_1d"), 3);
  CHECK(r.passed);
}

TEST_CASE("legendre commutation and momentum relation") {
  const auto model = make_system("harmonic_1d");
  for (auto side : {HamiltonianSide::Right, HamiltonianSide::Left}) {
    const auto [comm, rel] = check_commutation(model, side, 0);
    CHECK(comm.passed);
    CHECK(comm.measured <= 5e-10);
    CHECK(rel.passed);
  }
}

TEST_CASE("right and left plain steppers agree") {
  CHECK(check_right_left_agreement(make_system("harmonic_1d"), 0).passed);
  CHECK(check_right_left_agreement(make_system("planar_2d"), 0).passed);
}

TEST_CASE("initial pair from momentum inverts the left transform") {
  const auto model = make_system("planar_2d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  const Vec q0 = vec({0.2, -0.1}), p0 = vec({0.5, 0.3});
  const Vec q1 = initial_pair_from_momentum(Ld, model.atlas, 0, q0, p0, StepperConfig{});
  const auto leg = discrete_legendre(Ld, model.atlas, 0, q0, q1);
  CHECK(inf_norm(leg.p_minus - p0) <= 1e-12);
}

TEST_CASE("hamiltonian march across the circle seam") {
  const auto circle = make_system("free_rotor_circle");
  const auto Ld = midpoint_rule(circle.lagrangian, 0.05);
  const auto traj = integrate_hamiltonian(Ld, circle.atlas, 1, vec1(0.3), vec1(1.0), 160, StepperConfig{},
                                          HamiltonianScheme::RightConformal);
  int switches = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) switches += traj.points[k].chart != traj.points[k - 1].chart;
  CHECK(switches >= 1);
  for (const auto& pt : traj.points) CHECK(circle.atlas.in_domain(pt.chart, pt.q));
}
