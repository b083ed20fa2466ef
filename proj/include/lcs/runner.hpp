#pragma once

#include "lcs/catalog.hpp"
#include "lcs/discretize.hpp"
#include "lcs/hamiltonian_discrete.hpp"
#include "lcs/variational.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lcs {

enum class Method { Del, Dlcel, Rd, Ld, Rdlch, Ldlch, Rk4Lcel, Rk4Lcshe };
enum class Rule { Midpoint, Trapezoidal, Exact };

Method parse_method(const std::string& name);
std::string method_name(Method m);
Rule parse_rule(const std::string& name);
std::string rule_name(Rule r);

bool is_lagrangian(Method m);   ///< del, dlcel
bool is_hamiltonian(Method m);  ///< rd, ld, rdlch, ldlch
bool is_continuous(Method m);   ///< rk4-lcel, rk4-lcshe
/// False for the plain methods (del, rd, ld), which run with sigma = 0.
bool is_conformal(Method m);

/// Either the first two lattice points or a phase-space point (q, p).
struct InitialData {
  enum class Kind { Pair, Phase };
  Kind kind = Kind::Phase;
  Vec a;  ///< q0, or q
  Vec b;  ///< q1, or p
};

struct RunSpec {
  Method method = Method::Dlcel;
  Rule rule = Rule::Midpoint;
  double h = 0.1;
  int steps = 10;
  InitialData initial;
  StepperConfig cfg;
  ChartId chart = 0;
  double core_margin = 0.1;
};

struct OutputRow {
  int k = 0;
  double t = 0.0;
  ChartId chart = 0;
  Vec q;
  std::optional<Vec> p;
  std::optional<Vec> r;
  double sigma = 0.0;
  std::optional<double> energy;
};

struct RunOutput {
  int n = 1;
  std::vector<OutputRow> rows;
  std::vector<StepDiagnostics> diagnostics;
  std::optional<std::string> error;
  int failed_index = -1;

  bool ok() const { return !error.has_value(); }
};

/// The exact rule follows the extremals of `atlas` in `chart`.
DiscreteLagrangian make_discrete_lagrangian(const SystemModel& model,
                                            const ConformalAtlas& atlas, Rule rule, double h,
                                            ChartId chart);

/// Runs one method. Step failures are reported through RunOutput::error with
/// the rows computed before the failure; invalid specs throw InvalidArgument.
RunOutput run_method(const SystemModel& model, const RunSpec& spec);

/// Header `k,t,chart,q_0..,p_0..,r_0..,sigma,energy`, 17 significant digits,
/// empty cells for undefined momenta or energy.
void write_csv(std::ostream& out, const RunOutput& run);
std::string format_number(double x);

struct ConvergenceRow {
  double h = 0.0;
  int steps = 0;
  double error = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double h_ref = 0.0;
  double t_final = 0.0;
};

/// Sup-norm position error at t_final against fixed-step RK4 on the
/// locally conformal Euler-Lagrange equations at h_ref (default
/// min(hs) / 100), for each h; slope is the least-squares fit of log error
/// against log h. Requires phase initial data and at least three h values,
/// each dividing t_final.
ConvergenceResult convergence_study(const SystemModel& model, const RunSpec& base,
                                    const std::vector<double>& hs, double t_final,
                                    std::optional<double> h_ref = std::nullopt);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lcs
