#pragma once

#include "lcs/atlas.hpp"
#include "lcs/continuous.hpp"

#include <string>
#include <vector>

namespace lcs {

struct SystemModel {
  std::string name;
  int n = 1;
  ConformalAtlas atlas;
  ChartId default_chart = 0;
  ContinuousLagrangian lagrangian;
  ContinuousHamiltonian hamiltonian;
  std::vector<double> sigma_params;
};

/// Names accepted by make_system.
///   harmonic_1d                  L = v^2/2 - q^2/2 on R, sigma = c q (c = 0.1)
///   planar_2d                    L = |v|^2/2 - |q|^2/2 on R^2, sigma = c1 q1 + c2 q2 (0.3, 0.1)
///   free_rotor_circle            L = v^2/2 on S^1, charts 1 and 2, sigma = c theta per branch
///   free_rotor_circle_corrupted  as above with 0.01 theta added to chart 2 only
///   free_rotor_line              the free rotor on the universal cover, one chart
std::vector<std::string> builtin_systems();

/// Default conformal coefficients of a builtin.
std::vector<double> default_sigma_params(const std::string& name);

/// Throws InvalidArgument for unknown names or a wrong number of parameters.
/// An empty parameter list selects the defaults.
SystemModel make_system(const std::string& name, std::vector<double> sigma_params = {});

/// Linear conformal factor sigma(q) = c.q on a single chart.
ConformalAtlas linear_sigma_atlas(const Vec& c, Box domain, ChartId id = 0);

/// L = |v|^2/2 - k |q|^2/2 with every derivative analytic.
ContinuousLagrangian mechanical_lagrangian(int n, double stiffness);
ContinuousHamiltonian mechanical_hamiltonian(int n, double stiffness);

}  // namespace lcs
