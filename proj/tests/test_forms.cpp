#include <doctest.h>

#include "lcs/catalog.hpp"
#include "lcs/forms.hpp"
#include "support.hpp"

#include <cmath>

using namespace lcs;
using testing::vec;
using testing::vec1;

TEST_CASE("poincare-cartan one-forms") {
  const auto Ld = midpoint_rule(testing::free_particle(), 0.1);
  const auto f = pc_one_forms(Ld, vec1(0), vec1(0.1));
  CHECK(f.theta_plus[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.theta_minus[0] == doctest::Approx(1.0).epsilon(1e-15));

  // harmonic midpoint at (1, 1): d2 = (q1 - q0)/h - h (q0 + q1)/4
  const auto g = pc_one_forms(midpoint_rule(testing::harmonic(), 0.1), vec1(1), vec1(1));
  CHECK(g.theta_plus[0] == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("one-forms assemble the differential of the discrete lagrangian") {
  const auto model = make_system("planar_2d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  testing::Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const Vec q0 = rng.vec(2), q1 = rng.vec(2);
    Vec x(4);
    x << q0, q1;
    const Vec g = fd_gradient([&](const Vec& y) { return Ld.value(y.head(2), y.tail(2)); }, x, 1e-6);
    const auto f = pc_one_forms(Ld, q0, q1);
    Vec assembled(4);
    assembled << -f.theta_minus, f.theta_plus;
    CHECK(inf_norm(assembled - g) <= 1e-8);
  }
}

TEST_CASE("poincare-cartan two-form and regularity") {
  const double h = 0.1;
  const auto free = midpoint_rule(testing::free_particle(), h);
  const Mat w = pc_two_form(free).at(vec1(0), vec1(0.1));
  Mat expected(2, 2);
  expected << 0, 1 / h, -1 / h, 0;
  CHECK((w - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(regularity_check(free, vec1(0), vec1(0.1)).regular);

  const auto harm = regularity_check(midpoint_rule(testing::harmonic(), h), vec1(1), vec1(1));
  CHECK(harm.regular);
  CHECK(harm.determinant == doctest::Approx(-10.025).epsilon(1e-14));

  DiscreteLagrangian separable;
  separable.n = 1;
  separable.h = h;
  separable.value = [](const Vec& a, const Vec& b) { return std::sin(a[0]) + b[0] * b[0]; };
  separable.d1 = [](const Vec& a, const Vec&) { return vec1(std::cos(a[0])); };
  separable.d2 = [](const Vec&, const Vec& b) { return vec1(2 * b[0]); };
  separable.d1d2 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
  const auto sep = regularity_check(separable, vec1(0.2), vec1(0.4));
  CHECK(!sep.regular);
  CHECK(sep.determinant == 0.0);
}

TEST_CASE("conformal two-form") {
  const auto model = make_system("planar_2d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  testing::Rng rng(12);

  const auto flat = lc_pc_two_form(Ld, model.atlas.flattened(), 0);
  const auto plain = pc_two_form(Ld);
  const auto conf = lc_pc_two_form(Ld, model.atlas, 0);
  for (int i = 0; i < 10; ++i) {
    const Vec q0 = rng.vec(2), q1 = rng.vec(2);
    CHECK(flat.at(q0, q1) == plain.at(q0, q1));
    const Mat W = conf.at(q0, q1);
    CHECK((W + W.transpose()).isZero(0.0));
  }
}

TEST_CASE("one-dimensional conformal two-form component") {
  const double c = 0.4, h = 0.1;
  const auto Ld = midpoint_rule(testing::harmonic(), h);
  const auto W = lc_pc_two_form(Ld, testing::linear_atlas({c}), 0).at(vec1(0.3), vec1(0.4));
  const double expected = -Ld.d1d2(vec1(0.3), vec1(0.4))(0, 0) + c * Ld.d2(vec1(0.3), vec1(0.4))[0];
  CHECK(W(0, 1) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(W(1, 0) == -W(0, 1));
}

TEST_CASE("conformal two-form is -e^sigma d(e^-sigma theta+)") {
  const auto model = make_system("planar_2d");
  const auto Ld = midpoint_rule(model.lagrangian, 0.1);
  const auto form = lc_pc_two_form(Ld, model.atlas, 0);
  const auto& sigma = model.atlas.chart(0).sigma;
  const auto alpha = [&](const Vec& x) {
    Vec a = Vec::Zero(4);
    a.tail(2) = std::exp(-sigma(x.head(2))) * Ld.d2(x.head(2), x.tail(2));
    return a;
  };
  testing::Rng rng(13);
  for (int i = 0; i < 5; ++i) {
    Vec x = rng.vec(4);
    const Mat J = fd_jacobian(alpha, x, 1e-6);  // J(j, i) = d alpha_j / dx_i
    const Mat d_alpha = J.transpose() - J;
    const Mat oracle = -std::exp(sigma(x.head(2))) * d_alpha;
    const Mat W = form.at(x.head(2), x.tail(2));
    CHECK((W - oracle).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, W.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("lcs condition") {
  const auto planar = make_system("planar_2d");
  testing::Rng rng(21);
  std::vector<Vec> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(rng.vec(4));
  const VectorFn lee = [&](const Vec& q) { return lee_form(planar.atlas, 0, q); };

  for (auto rule : {midpoint_rule(planar.lagrangian, 0.1), trapezoidal_rule(planar.lagrangian, 0.1)}) {
    const auto rep = lcs_condition_check(lc_pc_two_form(rule, planar.atlas, 0), lee, samples);
    CHECK(rep.passed);
    CHECK(!rep.trivial);
    CHECK(rep.samples == 20);
  }

  const VectorFn zero = [](const Vec&) { return Vec(Vec::Zero(2)); };
  const auto closed = lcs_condition_check(pc_two_form(midpoint_rule(planar.lagrangian, 0.1)), zero, samples);
  CHECK(closed.passed);

  // a closed form does not satisfy d omega = dsigma ^ omega for nonzero dsigma
  const auto wrong = lcs_condition_check(pc_two_form(midpoint_rule(planar.lagrangian, 0.1)), lee, samples);
  CHECK(!wrong.passed);

  const auto one = make_system("harmonic_1d");
  const auto trivial = lcs_condition_check(lc_pc_two_form(midpoint_rule(one.lagrangian, 0.1), one.atlas, 0),
                                           [&](const Vec& q) { return lee_form(one.atlas, 0, q); },
                                           {vec({0.1, 0.2})});
  CHECK(trivial.passed);
  CHECK(trivial.trivial);
  CHECK(!trivial.note.empty());
}
