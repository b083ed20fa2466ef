#pragma once

#include "lcs/atlas.hpp"
#include "lcs/catalog.hpp"
#include "lcs/numerics.hpp"

#include <initializer_list>
#include <random>

namespace testing {

inline lcs::Vec vec(std::initializer_list<double> xs) {
  lcs::Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline lcs::Vec vec1(double x) { return lcs::Vec::Constant(1, x); }

inline lcs::ConformalAtlas linear_atlas(std::initializer_list<double> c) {
  return lcs::linear_sigma_atlas(vec(c), lcs::Box::unbounded(static_cast<int>(c.size())));
}

inline lcs::ContinuousLagrangian free_particle(int n = 1) {
  return lcs::mechanical_lagrangian(n, 0.0);
}

inline lcs::ContinuousLagrangian harmonic(int n = 1) {
  return lcs::mechanical_lagrangian(n, 1.0);
}

struct Rng {
  explicit Rng(unsigned seed) : gen(seed) {}
  double operator()(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  lcs::Vec vec(int n, double lo = -1.0, double hi = 1.0) {
    lcs::Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = (*this)(lo, hi);
    return v;
  }
  std::mt19937 gen;
};

}  // namespace testing
