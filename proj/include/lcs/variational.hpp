#pragma once

#include "lcs/atlas.hpp"
#include "lcs/discretize.hpp"
#include "lcs/errors.hpp"
#include "lcs/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcs {

struct TrajectoryPoint {
  int k = 0;
  ChartId chart = 0;
  Vec q;
  std::optional<Vec> r;
  std::optional<Vec> p;
};

struct StepDiagnostics {
  int k = 0;  ///< index of the point produced by the step
  int iterations = 0;
  double residual = 0.0;
  bool chart_switch = false;
};

struct DiscreteTrajectory {
  double h = 0.0;
  std::vector<TrajectoryPoint> points;
  std::vector<StepDiagnostics> diagnostics;

  std::size_t size() const { return points.size(); }
};

struct StepResult {
  Vec q_next;
  int iterations = 0;
  double residual = 0.0;
};

/// A marching loop failed; carries the trajectory computed so far.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& cause, int failed_index, DiscreteTrajectory partial)
      : NumericalError("step producing k=" + std::to_string(failed_index) +
                       " failed: " + cause),
        failed_index_(failed_index),
        partial_(std::move(partial)) {}
  int failed_index() const noexcept { return failed_index_; }
  const DiscreteTrajectory& partial() const noexcept { return partial_; }

 private:
  int failed_index_;
  DiscreteTrajectory partial_;
};

/// Solves D2 Ld(q_prev, q_curr) + D1 Ld(q_curr, q_next) = 0 for q_next,
/// seeded at 2 q_curr - q_prev.
StepResult del_step(const DiscreteLagrangian& Ld, const Vec& q_prev, const Vec& q_curr,
                    const StepperConfig& cfg);

/// Solves the discrete locally conformal Euler-Lagrange relation
///   e^{sigma(q_curr) - sigma(q_prev)} D2 Ld(q_prev, q_curr)
///     = Dsigma(q_curr) Ld(q_curr, q_next) - D1 Ld(q_curr, q_next)
/// in `chart`. Throws DomainError when q_next falls outside the chart.
StepResult dlcel_step(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                      ChartId chart, const Vec& q_prev, const Vec& q_curr,
                      const StepperConfig& cfg);

struct MarchOptions {
  bool conformal = true;
  double core_margin = 0.1;  ///< fraction of chart width trimmed on each side
  bool fill_momenta = true;
};

/// Marches N steps from (q0, q1), both given in start_chart. Whenever a new
/// point leaves the core of its chart, the last two points are moved
/// together to a chart whose core contains the new point. Momenta are filled
/// by momenta_along_trajectory. With conformal = false every conformal
/// factor is replaced by zero, which turns the stepper into del_step.
DiscreteTrajectory integrate(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             ChartId start_chart, const Vec& q0, const Vec& q1, int N,
                             const StepperConfig& cfg, const MarchOptions& opts = {});

/// Picks a chart whose core contains the image of q_new, reachable from
/// `chart` by a transition whose overlap contains every point of `carry`.
/// Returns nullopt when q_new is still inside the core of `chart` or no
/// such chart exists.
std::optional<ChartId> choose_chart(const ConformalAtlas& atlas, ChartId chart,
                                    const Vec& q_new, std::span<const Vec> carry,
                                    double core_margin);

/// S = sum_k e^{-sigma(q_k)} Ld(q_k, q_{k+1}), with point k and its successor
/// expressed in charts[k].
double action_sum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                  const std::vector<ChartId>& charts, const std::vector<Vec>& qs);

/// Single-chart convenience overload.
double action_sum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                  ChartId chart, const std::vector<Vec>& qs);

/// Largest interior component of dS/dq_k by central differences (relative
/// step eps). Throws InvalidArgument for fewer than three points.
double stationarity_residual(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             const DiscreteTrajectory& traj, double eps = 1e-6);

double stationarity_residual(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                             ChartId chart, const std::vector<Vec>& qs,
                             double eps = 1e-6);

}  // namespace lcs
