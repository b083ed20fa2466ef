#pragma once

#include "lcs/atlas.hpp"
#include "lcs/discretize.hpp"
#include "lcs/numerics.hpp"
#include "lcs/variational.hpp"

#include <functional>
#include <string>

namespace lcs {

/// Momenta at a lattice point: r = e^{-sigma(q)} p in `chart`.
struct MomentumPair {
  Vec r;
  Vec p;
  ChartId chart = 0;
  Vec q;
};

MomentumPair make_momentum_pair(const ConformalAtlas& atlas, ChartId chart, const Vec& q,
                                const Vec& p);

struct DiscreteLegendre {
  Vec r_plus;
  Vec r_minus;
  Vec p_plus;
  Vec p_minus;
};

/// Local right and left discrete Legendre transforms of the pair (q0, q1):
///   r+ = e^{-sigma(q0)} D2 Ld,  r- = e^{-sigma(q0)} (Dsigma(q0) Ld - D1 Ld),
///   p+- = e^{sigma(q0)} r+-.
DiscreteLegendre discrete_legendre(const DiscreteLagrangian& Ld,
                                   const ConformalAtlas& atlas, ChartId chart,
                                   const Vec& q0, const Vec& q1);

/// Fills r and p at every point. p_k is p-(k, k+1) at k < N and the shifted
/// right momentum e^{sigma(q_N) - sigma(q_{N-1})} p+(N-1, N) at k = N; both
/// evaluated in the chart of point k. At interior points the two expressions
/// must agree within tol * max(1, |p_k|), otherwise ConsistencyError.
void momenta_along_trajectory(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                              DiscreteTrajectory& traj, double tol);

enum class HamiltonianSide { Right, Left };
enum class HamiltonianProvenance { Analytic, FromLagrangian };

struct HamiltonianJet {
  double value = 0.0;
  Vec d1;
  Vec d2;
};

/// Right: arguments (q_k, p_{k+1}). Left: arguments (q_{k+1}, p_k).
struct DiscreteHamiltonian {
  int n = 1;
  double h = 0.0;
  HamiltonianSide side = HamiltonianSide::Right;
  HamiltonianProvenance provenance = HamiltonianProvenance::Analytic;
  PairScalarFn value;
  PairVectorFn d1;
  PairVectorFn d2;
  /// Optional: value and both partials from one evaluation.
  std::function<HamiltonianJet(const Vec&, const Vec&)> jet_fn;
  /// Optional initial guess for the unknown point of a step from (q, p).
  PairVectorFn step_seed;

  HamiltonianJet jet(const Vec& a, const Vec& b) const;
  Vec seed(const Vec& q, const Vec& p) const;
};

/// H+(q, p') = e^{sigma(q) - sigma(Q)} p'.Q - Ld(q, Q), where Q solves
/// p' = e^{sigma(Q) - sigma(q)} D2 Ld(q, Q). Partials are taken in the local
/// (q, r) chart, with the conversion factor between p' and r' held fixed,
/// and evaluated in closed form at the solution Q. Throws BranchError when
/// the inversion Jacobian changes sign between the linear seed and Q.
DiscreteHamiltonian build_right_hamiltonian(const DiscreteLagrangian& Ld,
                                            const ConformalAtlas& atlas, ChartId chart,
                                            const StepperConfig& inner = {1e-14, 50, 6, 1e-6});

/// H-(Q, p) = e^{sigma(Q) - sigma(q)} (-p.q - Ld(q, Q)), where q solves
/// p = Dsigma(q) Ld(q, Q) - D1 Ld(q, Q). Partials as for the right side.
DiscreteHamiltonian build_left_hamiltonian(const DiscreteLagrangian& Ld,
                                           const ConformalAtlas& atlas, ChartId chart,
                                           const StepperConfig& inner = {1e-14, 50, 6, 1e-6});

/// Point solving the implicit relation behind a Lagrangian-derived Hamiltonian.
/// Right: Q from (q, p'). Left: q from (Q, p).
Vec right_inversion(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                    ChartId chart, const Vec& q, const Vec& p_next,
                    const StepperConfig& inner);
Vec left_inversion(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                   ChartId chart, const Vec& q_next, const Vec& p,
                   const StepperConfig& inner);

struct PhaseStepResult {
  Vec q_next;
  Vec p_next;
  int iterations = 0;
  double residual = 0.0;
};

/// p_k = D1 H+(q_k, p_{k+1}), q_{k+1} = D2 H+(q_k, p_{k+1}).
PhaseStepResult rd_step(const DiscreteHamiltonian& Hd, const Vec& q_curr,
                        const Vec& p_curr, const StepperConfig& cfg);

/// q_k = -D2 H-(q_{k+1}, p_k), p_{k+1} = -D1 H-(q_{k+1}, p_k).
PhaseStepResult ld_step(const DiscreteHamiltonian& Hd, const Vec& q_curr,
                        const Vec& p_curr, const StepperConfig& cfg);

/// Right discrete LCS Hamilton equations, both lines solved together:
///   q_{k+1} = e^{sigma(q_{k+1}) - sigma(q_k)} D2 H+,
///   p_k = D1 H+ - Dsigma(q_k) H+.
PhaseStepResult rdlch_step(const DiscreteHamiltonian& Hd, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q_curr, const Vec& p_curr,
                           const StepperConfig& cfg);

/// Left discrete LCS Hamilton equations, both lines solved together:
///   q_k = -e^{sigma(q_k) - sigma(q_{k+1})} D2 H-,
///   P = e^{sigma(q_k) - sigma(q_{k+1})} (Dsigma(q_{k+1}) H- - D1 H-),
/// after which the lattice momentum is p_{k+1} = e^{sigma(q_{k+1}) - sigma(q_k)} P.
PhaseStepResult ldlch_step(const DiscreteHamiltonian& Hd, const ConformalAtlas& atlas,
                           ChartId chart, const Vec& q_curr, const Vec& p_curr,
                           const StepperConfig& cfg);

enum class HamiltonianScheme { Right, Left, RightConformal, LeftConformal };

/// Marches N Hamiltonian steps from (q0, p0) in start_chart. The discrete
/// Hamiltonian is built from Ld on each chart visited; chart switches
/// transport (q, p) as a p-kind covector. The plain schemes run on the
/// flattened atlas.
DiscreteTrajectory integrate_hamiltonian(const DiscreteLagrangian& Ld,
                                         const ConformalAtlas& atlas, ChartId start_chart,
                                         const Vec& q0, const Vec& p0, int N,
                                         const StepperConfig& cfg, HamiltonianScheme scheme,
                                         double core_margin = 0.1);

/// Second point of a Lagrangian trajectory whose momentum at q0 is p0, i.e.
/// q1 with p-(q0, q1) = p0 in `chart`.
Vec initial_pair_from_momentum(const DiscreteLagrangian& Ld, const ConformalAtlas& atlas,
                               ChartId chart, const Vec& q0, const Vec& p0,
                               const StepperConfig& cfg);

}  // namespace lcs
