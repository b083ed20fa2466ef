#pragma once

#include "lcs/atlas.hpp"
#include "lcs/discretize.hpp"

#include <string>
#include <vector>

namespace lcs {

struct PcOneForms {
  Vec theta_plus;   ///< coefficients on dq_{k+1}: D2 Ld
  Vec theta_minus;  ///< coefficients on dq_k: -D1 Ld
};

PcOneForms pc_one_forms(const DiscreteLagrangian& Ld, const Vec& q0, const Vec& q1);

/// Two-form on the space of pairs (q_k, q_{k+1}), coordinates ordered
/// (q_k, q_{k+1}).
struct TwoFormField {
  int dim = 2;
  PairMatrixFn components;

  Mat at(const Vec& q0, const Vec& q1) const { return components(q0, q1); }
};

/// -D1D2 Ld dq_k ^ dq_{k+1}, i.e. [[0, -D1D2 Ld], [(D1D2 Ld)^T, 0]].
TwoFormField pc_two_form(const DiscreteLagrangian& Ld);

struct RegularityReport {
  double determinant = 0.0;
  double condition = 0.0;
  double threshold = 1e-10;
  bool regular = false;
};

RegularityReport regularity_check(const DiscreteLagrangian& Ld, const Vec& q0,
                                  const Vec& q1, double threshold = 1e-10);

/// Right discrete locally conformal Poincare-Cartan two-form
/// omega + dsigma(q_k) ^ theta+, whose (q_k, q_{k+1}) block is
/// -D1D2 Ld + Dsigma(q_k) (x) D2 Ld.
TwoFormField lc_pc_two_form(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                            ChartId chart);

struct LcsConditionReport {
  bool passed = true;
  bool trivial = false;
  int samples = 0;
  double max_deviation = 0.0;
  double scale = 1.0;
  double tolerance = 0.0;  ///< rel_tol * scale
  std::string note;
};

/// Compares d omega with dsigma(q_k) ^ omega on every increasing index
/// triple at each sample point (q_k stacked over q_{k+1}). d omega uses
/// central differences of the components with step eps. Passes iff the
/// largest deviation is at most rel_tol * max(1, |omega|, |dsigma ^ omega|).
/// Forms on a space of dimension below 4 pass trivially.
LcsConditionReport lcs_condition_check(const TwoFormField& form, const VectorFn& lee,
                                       const std::vector<Vec>& samples, double eps = 1e-4,
                                       double rel_tol = 1e-4);

}  // namespace lcs
