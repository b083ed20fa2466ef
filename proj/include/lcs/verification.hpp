#pragma once

#include "lcs/catalog.hpp"
#include "lcs/runner.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lcs {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> details;
};

struct VerifyReport {
  std::string system;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

inline constexpr char kDivergenceNote[] =
    "divergence convention: asserted value is n<phi, xi_H> (n = dim Q) in coordinate volume, "
    "from direct coordinate computation of the Hamilton equations; the normalization "
    "(1/2) n<phi, xi_H> differs from it by a factor of two and is not used";

CheckResult check_cocycle(const SystemModel& model, double tol = 1e-10);

/// sigma_grad against central differences of sigma (eps 1e-5), relative to
/// max(1, |grad sigma|), and closedness of the Lee form.
CheckResult check_lee_form(const SystemModel& model, std::uint64_t seed, int samples = 100);

/// det of the LCS two-form matrix equals 1.
CheckResult check_two_form_determinant(const SystemModel& model, std::uint64_t seed,
                                       int samples = 100);

/// dlcel_step with a constant conformal factor against del_step. Both
/// solves run at `tol`, which must sit well below the 1e-12 comparison.
CheckResult check_lagrangian_reduction(const SystemModel& model, std::uint64_t seed,
                                       int samples = 100, double h = 0.1,
                                       double tol = 1e-14);

/// rdlch_step / ldlch_step with a constant conformal factor against rd_step / ld_step.
CheckResult check_hamiltonian_reduction(const SystemModel& model, std::uint64_t seed,
                                        int samples = 100, double h = 0.1,
                                        double tol = 1e-14);

/// Stationarity of the action sum along dLCEL trajectories.
CheckResult check_stationarity(const SystemModel& model, std::uint64_t seed,
                               int trajectories = 5, int steps = 100, double h = 0.1,
                               double tol = 1e-12, double bound = 1e-8);

/// dLCEL trajectory pushed through momenta_along_trajectory against the
/// right (or left) discrete LCS Hamiltonian trajectory from the same (q0, p0).
/// The second result checks r = e^{-sigma} p at every point of both.
std::pair<CheckResult, CheckResult> check_commutation(const SystemModel& model,
                                                      HamiltonianSide side,
                                                      std::uint64_t seed, int steps = 100,
                                                      double h = 0.1, double tol = 1e-12,
                                                      double bound = 5e-10);

/// Plain right and left steppers generate the same trajectory (sigma = 0).
CheckResult check_right_left_agreement(const SystemModel& model, std::uint64_t seed,
                                       int steps = 100, double h = 0.1, double tol = 1e-12);

/// Midpoint dLCEL convergence order against an RK4 reference.
CheckResult check_convergence(const SystemModel& model, const std::vector<double>& hs,
                              double h_ref, double t_final = 1.0, double lo = 1.8,
                              double hi = 2.2);

/// RK4 on the Hamilton and Euler-Lagrange forms from matched data.
CheckResult check_continuous_equivalence(const SystemModel& model, std::uint64_t seed,
                                         double h = 1e-4, double t_final = 1.0,
                                         double bound = 1e-8);

CheckResult check_lcs_condition(const SystemModel& model, Rule rule, std::uint64_t seed,
                                int samples = 20);

/// divergence_numeric of the Hamiltonian field against n <phi, dq/dt>.
CheckResult check_divergence(const SystemModel& model, std::uint64_t seed, int samples = 50,
                             double bound = 1e-5);

/// Multi-chart trajectories with different core margins agree in a common chart.
CheckResult check_chart_independence(const SystemModel& model, double h = 0.05,
                                     int steps = 160, double bound = 1e-9);

/// Circle-atlas dLCEL trajectory against the same motion on the universal
/// cover, plus the cocycle deviation of the circle atlas.
CheckResult check_globalization(const SystemModel& circle, double h = 0.05, int steps = 160,
                                double bound = 1e-9, double cocycle_bound = 1e-12);

/// |midpoint - exact| shrinks at least `min_ratio` times when h halves from
/// 0.1 to 0.05, at point pairs q1 = q0 + h v (harmonic, sigma = 0).
CheckResult check_exact_lagrangian(std::uint64_t seed, int pairs = 10, double min_ratio = 6.0);

/// Every suite applicable to the named builtin.
VerifyReport run_verify(const std::string& system, std::uint64_t seed);

}  // namespace lcs
