#include "lcs/forms.hpp"

#include "lcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace lcs {

PcOneForms pc_one_forms(const DiscreteLagrangian& Ld, const Vec& q0, const Vec& q1) {
  return {Ld.d2(q0, q1), -Ld.d1(q0, q1)};
}

namespace {

Mat assemble_cross(const Mat& M) {
  const Eigen::Index n = M.rows();
  Mat out = Mat::Zero(2 * n, 2 * n);
  out.topRightCorner(n, n) = M;
  out.bottomLeftCorner(n, n) = -M.transpose();
  return out;
}

}  // namespace

TwoFormField pc_two_form(const DiscreteLagrangian& Ld) {
  TwoFormField f;
  f.dim = 2 * Ld.n;
  f.components = [d1d2 = Ld.d1d2](const Vec& q0, const Vec& q1) -> Mat {
    return assemble_cross(-d1d2(q0, q1));
  };
  return f;
}

RegularityReport regularity_check(const DiscreteLagrangian& Ld, const Vec& q0,
                                  const Vec& q1, double threshold) {
  const Mat M = Ld.d1d2(q0, q1);
  RegularityReport r;
  r.determinant = M.determinant();
  r.condition = condition_number(M);
  r.threshold = threshold;
  r.regular = std::abs(r.determinant) > threshold;
  return r;
}

TwoFormField lc_pc_two_form(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                            ChartId chart) {
  auto A = std::make_shared<const ConformalAtlas>(atlas);
  TwoFormField f;
  f.dim = 2 * Ld.n;
  f.components = [A, chart, d1d2 = Ld.d1d2, d2 = Ld.d2](const Vec& q0,
                                                        const Vec& q1) -> Mat {
    const Vec phi = lee_form(*A, chart, q0);
    return assemble_cross(-d1d2(q0, q1) + phi * d2(q0, q1).transpose());
  };
  return f;
}

LcsConditionReport lcs_condition_check(const TwoFormField& form, const VectorFn& lee,
                                       const std::vector<Vec>& samples, double eps,
                                       double rel_tol) {
  if (!(eps > 0.0)) throw InvalidArgument("lcs_condition_check: eps must be positive");
  LcsConditionReport rep;
  rep.samples = static_cast<int>(samples.size());
  const int m = form.dim;
  if (m < 4) {
    rep.trivial = true;
    rep.tolerance = rel_tol;
    rep.note = "every 3-form vanishes on a space of dimension " + std::to_string(m);
    return rep;
  }
  const int n = m / 2;
  auto eval = [&](const Vec& x) { return form.components(x.head(n), x.tail(n)); };

  double worst = 0.0;
  double scale = 1.0;
  for (const Vec& x : samples) {
    if (x.size() != m) throw InvalidArgument("lcs_condition_check: sample has wrong length");
    const Mat w = eval(x);
    Vec alpha = Vec::Zero(m);
    alpha.head(n) = lee(x.head(n));

    std::vector<Mat> dw(static_cast<std::size_t>(m));
    Vec xp = x;
    for (int a = 0; a < m; ++a) {
      xp[a] = x[a] + eps;
      const Mat fp = eval(xp);
      xp[a] = x[a] - eps;
      const Mat fm = eval(xp);
      xp[a] = x[a];
      dw[a] = (fp - fm) / (2.0 * eps);
    }

    scale = std::max(scale, w.cwiseAbs().maxCoeff());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int c = b + 1; c < m; ++c) {
          const double d = dw[a](b, c) - dw[b](a, c) + dw[c](a, b);
          const double wedge = alpha[a] * w(b, c) - alpha[b] * w(a, c) + alpha[c] * w(a, b);
          scale = std::max(scale, std::abs(wedge));
          worst = std::max(worst, std::abs(d - wedge));
        }
  }
  rep.max_deviation = worst;
  rep.scale = scale;
  rep.tolerance = rel_tol * scale;
  rep.passed = worst <= rep.tolerance;
  return rep;
}

}  // namespace lcs
