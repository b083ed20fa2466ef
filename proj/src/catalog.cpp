#include "lcs/catalog.hpp"

#include "lcs/errors.hpp"

#include <numbers>

namespace lcs {

namespace {

constexpr double kPi = std::numbers::pi;

Box interval(double lo, double hi) {
  Box b;
  b.lower = Vec::Constant(1, lo);
  b.upper = Vec::Constant(1, hi);
  return b;
}

Chart angle_chart(ChartId id, double lo, double hi, double c) {
  Chart ch;
  ch.id = id;
  ch.dim = 1;
  ch.domain = interval(lo, hi);
  ch.sigma = [c](const Vec& q) { return c * q[0]; };
  ch.sigma_grad = [c](const Vec&) { return Vec::Constant(1, c); };
  return ch;
}

TransitionMap shift(ChartId from, ChartId to, double lo, double hi, double offset) {
  TransitionMap t;
  t.from_chart = from;
  t.to_chart = to;
  t.overlap = interval(lo, hi);
  t.forward = [offset](const Vec& q) -> Vec { return q.array() + offset; };
  t.jacobian = [](const Vec&) { return Mat::Identity(1, 1); };
  return t;
}

ConformalAtlas circle_atlas(double c, double corruption) {
  Chart one = angle_chart(1, -kPi / 4, 5 * kPi / 4, c);
  Chart two = angle_chart(2, 3 * kPi / 4, 9 * kPi / 4, c + corruption);
  std::vector<TransitionMap> ts = {
      shift(1, 2, 3 * kPi / 4, 5 * kPi / 4, 0.0),
      shift(1, 2, -kPi / 4, kPi / 4, 2 * kPi),
      shift(2, 1, 3 * kPi / 4, 5 * kPi / 4, 0.0),
      shift(2, 1, 7 * kPi / 4, 9 * kPi / 4, -2 * kPi),
  };
  return ConformalAtlas({one, two}, ts);
}

}  // namespace

std::vector<std::string> builtin_systems() {
  return {"harmonic_1d", "planar_2d", "free_rotor_circle", "free_rotor_circle_corrupted",
          "free_rotor_line"};
}

std::vector<double> default_sigma_params(const std::string& name) {
  if (name == "planar_2d") return {0.3, 0.1};
  for (const auto& s : builtin_systems())
    if (s == name) return {0.1};
  throw InvalidArgument("unknown system '" + name + "'");
}

ConformalAtlas linear_sigma_atlas(const Vec& c, Box domain, ChartId id) {
  const int n = static_cast<int>(c.size());
  return ConformalAtlas::single_chart(
      n, [c](const Vec& q) { return c.dot(q); }, [c](const Vec&) { return c; },
      std::move(domain), id);
}

ContinuousLagrangian mechanical_lagrangian(int n, double k) {
  ContinuousLagrangian L;
  L.n = n;
  L.value = [k](const Vec& q, const Vec& v) { return 0.5 * v.squaredNorm() - 0.5 * k * q.squaredNorm(); };
  L.grad_q = [k](const Vec& q, const Vec&) -> Vec { return -k * q; };
  L.grad_v = [](const Vec&, const Vec& v) -> Vec { return v; };
  L.hess_vv = [n](const Vec&, const Vec&) -> Mat { return Mat::Identity(n, n); };
  L.hess_vq = [n](const Vec&, const Vec&) -> Mat { return Mat::Zero(n, n); };
  L.hess_qq = [n, k](const Vec&, const Vec&) -> Mat { return -k * Mat::Identity(n, n); };
  return L;
}

ContinuousHamiltonian mechanical_hamiltonian(int n, double k) {
  ContinuousHamiltonian H;
  H.n = n;
  H.value = [k](const Vec& q, const Vec& p) { return 0.5 * p.squaredNorm() + 0.5 * k * q.squaredNorm(); };
  H.grad_q = [k](const Vec& q, const Vec&) -> Vec { return k * q; };
  H.grad_p = [](const Vec&, const Vec& p) -> Vec { return p; };
  return H;
}

SystemModel make_system(const std::string& name, std::vector<double> params) {
  const auto defaults = default_sigma_params(name);
  if (params.empty()) params = defaults;
  if (params.size() != defaults.size())
    throw InvalidArgument("system '" + name + "' takes " + std::to_string(defaults.size()) +
                          " sigma parameter(s), got " + std::to_string(params.size()));
  SystemModel m;
  m.name = name;
  m.sigma_params = params;
  const double c = params[0];
  if (name == "harmonic_1d" || name == "planar_2d") {
    m.n = static_cast<int>(params.size());
    const Vec cv = Eigen::Map<const Vec>(params.data(), m.n);
    m.atlas = linear_sigma_atlas(cv, Box::unbounded(m.n));
    m.lagrangian = mechanical_lagrangian(m.n, 1.0);
    m.hamiltonian = mechanical_hamiltonian(m.n, 1.0);
  } else if (name == "free_rotor_line") {
    m.atlas = linear_sigma_atlas(Vec::Constant(1, c), Box::unbounded(1));
    m.lagrangian = mechanical_lagrangian(1, 0.0);
    m.hamiltonian = mechanical_hamiltonian(1, 0.0);
  } else {
    m.atlas = circle_atlas(c, name == "free_rotor_circle_corrupted" ? 0.01 : 0.0);
    m.default_chart = 1;
    m.lagrangian = mechanical_lagrangian(1, 0.0);
    m.hamiltonian = mechanical_hamiltonian(1, 0.0);
  }
  return m;
}

}  // namespace lcs
