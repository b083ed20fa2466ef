#pragma once

#include "lcs/numerics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lcs {

using ChartId = int;

/// Axis-aligned coordinate box. Bounds may be infinite. A periodic
/// coordinate is never considered out of bounds.
struct Box {
  Vec lower;
  Vec upper;
  std::vector<bool> periodic;  ///< empty means no periodic coordinates

  int dim() const { return static_cast<int>(lower.size()); }
  bool is_periodic(int i) const {
    return i < static_cast<int>(periodic.size()) && periodic[i];
  }
  bool contains(const Vec& q) const;
  /// Index of the first coordinate outside the box, if any.
  std::optional<int> first_violation(const Vec& q) const;
  /// The box shrunk by `fraction` of its width on every side of every
  /// finite, non-periodic coordinate.
  Box shrunk(double fraction) const;

  static Box unbounded(int dim);
};

/// A coordinate chart of Q together with its conformal factor sigma.
struct Chart {
  ChartId id = 0;
  int dim = 1;
  Box domain;
  ScalarFn sigma;
  VectorFn sigma_grad;  ///< may be empty: central differences are used then

  Vec sigma_gradient(const Vec& q) const;
};

/// Coordinate change from one chart to another on one connected overlap.
struct TransitionMap {
  ChartId from_chart = 0;
  ChartId to_chart = 0;
  Box overlap;  ///< expressed in from_chart coordinates
  VectorFn forward;
  MatrixFn jacobian;
};

enum class MomentumKind { R, P };

/// Charts, conformal factors and transitions. Immutable after construction.
class ConformalAtlas {
 public:
  ConformalAtlas() = default;
  ConformalAtlas(std::vector<Chart> charts, std::vector<TransitionMap> transitions);

  /// One chart with the given conformal factor on `domain`.
  static ConformalAtlas single_chart(int dim, ScalarFn sigma, VectorFn sigma_grad,
                                     Box domain, ChartId id = 0);

  int dim() const { return dim_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const std::vector<TransitionMap>& transitions() const { return transitions_; }
  const Chart& chart(ChartId id) const;
  bool has_chart(ChartId id) const;

  /// sigma of `chart` at q; throws DomainError when q is outside the chart.
  double sigma(ChartId chart, const Vec& q) const;
  void require_in_domain(ChartId chart, const Vec& q) const;
  bool in_domain(ChartId chart, const Vec& q) const;

  /// First transition from `from` to `to` whose overlap contains every
  /// given point, or nullptr.
  const TransitionMap* find_transition(ChartId from, ChartId to,
                                       std::span<const Vec> points) const;

  /// Same charts and transitions with every conformal factor set to zero.
  ConformalAtlas flattened() const;

  /// Same charts and transitions with every conformal factor replaced by
  /// a constant.
  ConformalAtlas with_constant_sigma(double value) const;

 private:
  std::vector<Chart> charts_;
  std::vector<TransitionMap> transitions_;
  int dim_ = 0;
};

/// Lee form components phi_i = d sigma / d q^i of `chart` at q.
Vec lee_form(const ConformalAtlas& atlas, ChartId chart, const Vec& q);

/// A_ij = phi_i p_j - phi_j p_i.
Mat a_matrix(const Vec& phi, const Vec& p);

/// Matrix of the LCS two-form dq^i ^ dp_i + 1/2 A_ij dq^i ^ dq^j in the
/// ordered basis (dq^1..dq^n, dp_1..dp_n): [[A, I], [-I, 0]].
Mat lcs_two_form_matrix(const ConformalAtlas& atlas, ChartId chart, const Vec& q,
                        const Vec& p);

struct ChartState {
  ChartId chart = 0;
  Vec q;
  Vec momentum;
};

/// Moves a (point, covector) pair from one chart to another. The covector is
/// transported by the inverse transpose Jacobian; r-momenta are additionally
/// rescaled by exp(sigma_from(q) - sigma_to(q')) so that p stays continuous.
ChartState transition_apply(const ConformalAtlas& atlas, ChartId from, ChartId to,
                            const Vec& q, const Vec& momentum, MomentumKind kind);

/// Coordinates of q (given in `from`) in chart `to`; identity when equal.
Vec express_in_chart(const ConformalAtlas& atlas, ChartId from, ChartId to,
                     const Vec& q);

struct OverlapDeviation {
  std::size_t transition_index = 0;
  ChartId from_chart = 0;
  ChartId to_chart = 0;
  double offset = 0.0;         ///< mean of sigma_from - sigma_to o forward
  double max_deviation = 0.0;  ///< max distance from that mean
  int samples = 0;
};

struct CocycleReport {
  std::vector<OverlapDeviation> overlaps;
  double tolerance = 1e-10;
  bool passed = true;
  double max_deviation() const;
};

/// Samples every declared overlap and checks that sigma_from - sigma_to o forward
/// is constant there.
CocycleReport cocycle_check(const ConformalAtlas& atlas, int samples_per_overlap = 16,
                            double tolerance = 1e-10);

}  // namespace lcs
