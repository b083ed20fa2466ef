#include "lcs/atlas.hpp"

#include "lcs/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace lcs {

bool Box::contains(const Vec& q) const { return !first_violation(q).has_value(); }

std::optional<int> Box::first_violation(const Vec& q) const {
  if (q.size() != lower.size())
    throw InvalidArgument("point dimension " + std::to_string(q.size()) +
                          " does not match box dimension " +
                          std::to_string(lower.size()));
  for (int i = 0; i < dim(); ++i) {
    if (is_periodic(i)) continue;
    if (!(q[i] >= lower[i] && q[i] <= upper[i])) return i;
  }
  return std::nullopt;
}

Box Box::shrunk(double fraction) const {
  Box out = *this;
  for (int i = 0; i < dim(); ++i) {
    if (is_periodic(i) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      continue;
    const double margin = fraction * (upper[i] - lower[i]);
    out.lower[i] += margin;
    out.upper[i] -= margin;
  }
  return out;
}

Box Box::unbounded(int dim) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return Box{Vec::Constant(dim, -inf), Vec::Constant(dim, inf), {}};
}

Vec Chart::sigma_gradient(const Vec& q) const {
  if (sigma_grad) return sigma_grad(q);
  return fd_gradient(sigma, q, 1e-6);
}

ConformalAtlas::ConformalAtlas(std::vector<Chart> charts,
                               std::vector<TransitionMap> transitions)
    : charts_(std::move(charts)), transitions_(std::move(transitions)) {
  if (charts_.empty()) throw InvalidArgument("an atlas needs at least one chart");
  dim_ = charts_.front().dim;
  for (const auto& c : charts_) {
    if (c.dim != dim_ || c.domain.dim() != dim_)
      throw InvalidArgument("chart " + std::to_string(c.id) +
                            " has inconsistent dimension");
    if (!c.sigma) throw InvalidArgument("chart " + std::to_string(c.id) + " has no sigma");
    for (int i = 0; i < dim_; ++i) {
      if (!c.domain.is_periodic(i) && !(c.domain.lower[i] < c.domain.upper[i]))
        throw InvalidArgument("chart " + std::to_string(c.id) + " has an empty domain");
    }
    if (std::count_if(charts_.begin(), charts_.end(),
                      [&](const Chart& o) { return o.id == c.id; }) != 1)
      throw InvalidArgument("duplicate chart id " + std::to_string(c.id));
  }
  for (const auto& t : transitions_) {
    if (!has_chart(t.from_chart)) throw UnknownChartError(t.from_chart);
    if (!has_chart(t.to_chart)) throw UnknownChartError(t.to_chart);
    if (!t.forward || !t.jacobian)
      throw InvalidArgument("transition without forward map or jacobian");
  }
}

ConformalAtlas ConformalAtlas::single_chart(int dim, ScalarFn sigma, VectorFn sigma_grad,
                                            Box domain, ChartId id) {
  Chart c{id, dim, std::move(domain), std::move(sigma), std::move(sigma_grad)};
  return ConformalAtlas({std::move(c)}, {});
}

const Chart& ConformalAtlas::chart(ChartId id) const {
  for (const auto& c : charts_)
    if (c.id == id) return c;
  throw UnknownChartError(id);
}

bool ConformalAtlas::has_chart(ChartId id) const {
  return std::any_of(charts_.begin(), charts_.end(),
                     [id](const Chart& c) { return c.id == id; });
}

void ConformalAtlas::require_in_domain(ChartId id, const Vec& q) const {
  const Chart& c = chart(id);
  if (auto bad = c.domain.first_violation(q)) throw DomainError(id, *bad, q[*bad]);
}

bool ConformalAtlas::in_domain(ChartId id, const Vec& q) const {
  return chart(id).domain.contains(q);
}

double ConformalAtlas::sigma(ChartId id, const Vec& q) const {
  require_in_domain(id, q);
  return chart(id).sigma(q);
}

const TransitionMap* ConformalAtlas::find_transition(ChartId from, ChartId to,
                                                     std::span<const Vec> points) const {
  for (const auto& t : transitions_) {
    if (t.from_chart != from || t.to_chart != to) continue;
    if (std::all_of(points.begin(), points.end(),
                    [&](const Vec& q) { return t.overlap.contains(q); }))
      return &t;
  }
  return nullptr;
}

ConformalAtlas ConformalAtlas::flattened() const { return with_constant_sigma(0.0); }

ConformalAtlas ConformalAtlas::with_constant_sigma(double value) const {
  std::vector<Chart> charts = charts_;
  for (auto& c : charts) {
    const int n = c.dim;
    c.sigma = [value](const Vec&) { return value; };
    c.sigma_grad = [n](const Vec&) { return Vec::Zero(n).eval(); };
  }
  return ConformalAtlas(std::move(charts), transitions_);
}

Vec lee_form(const ConformalAtlas& atlas, ChartId chart, const Vec& q) {
  atlas.require_in_domain(chart, q);
  return atlas.chart(chart).sigma_gradient(q);
}

Mat a_matrix(const Vec& phi, const Vec& p) {
  if (phi.size() != p.size())
    throw InvalidArgument("a_matrix: phi has length " + std::to_string(phi.size()) +
                          " but p has length " + std::to_string(p.size()));
  const Eigen::Index n = phi.size();
  Mat A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      A(i, j) = phi[i] * p[j] - phi[j] * p[i];
      A(j, i) = -A(i, j);
    }
  }
  return A;
}

Mat lcs_two_form_matrix(const ConformalAtlas& atlas, ChartId chart, const Vec& q,
                        const Vec& p) {
  const Vec phi = lee_form(atlas, chart, q);
  const Eigen::Index n = q.size();
  Mat omega = Mat::Zero(2 * n, 2 * n);
  omega.topLeftCorner(n, n) = a_matrix(phi, p);
  omega.topRightCorner(n, n) = Mat::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return omega;
}

namespace {

const TransitionMap& require_transition(const ConformalAtlas& atlas, ChartId from,
                                        ChartId to, const Vec& q) {
  const std::array<Vec, 1> pts{q};
  if (const auto* t = atlas.find_transition(from, to, pts)) return *t;
  for (const auto& t : atlas.transitions()) {
    if (t.from_chart == from && t.to_chart == to) {
      const int bad = t.overlap.first_violation(q).value_or(0);
      throw DomainError(from, bad, q[bad]);
    }
  }
  throw InvalidArgument("no transition from chart " + std::to_string(from) +
                        " to chart " + std::to_string(to));
}

}  // namespace

ChartState transition_apply(const ConformalAtlas& atlas, ChartId from, ChartId to,
                            const Vec& q, const Vec& momentum, MomentumKind kind) {
  if (momentum.size() != q.size())
    throw InvalidArgument("transition_apply: momentum and point lengths differ");
  if (from == to) {
    atlas.require_in_domain(from, q);
    return {to, q, momentum};
  }
  const TransitionMap& t = require_transition(atlas, from, to, q);
  ChartState out;
  out.chart = to;
  out.q = t.forward(q);
  const Mat J = t.jacobian(q);
  out.momentum = J.transpose().partialPivLu().solve(momentum);
  if (kind == MomentumKind::R) {
    const double scale =
        std::exp(atlas.sigma(from, q) - atlas.sigma(to, out.q));
    out.momentum *= scale;
  }
  return out;
}

Vec express_in_chart(const ConformalAtlas& atlas, ChartId from, ChartId to,
                     const Vec& q) {
  if (from == to) return q;
  return require_transition(atlas, from, to, q).forward(q);
}

double CocycleReport::max_deviation() const {
  double m = 0.0;
  for (const auto& o : overlaps) m = std::max(m, o.max_deviation);
  return m;
}

CocycleReport cocycle_check(const ConformalAtlas& atlas, int samples_per_overlap,
                            double tolerance) {
  CocycleReport report;
  report.tolerance = tolerance;
  const int samples = std::max(8, samples_per_overlap);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto& transitions = atlas.transitions();
  for (std::size_t idx = 0; idx < transitions.size(); ++idx) {
    const auto& t = transitions[idx];
    const Chart& from = atlas.chart(t.from_chart);
    const Chart& to = atlas.chart(t.to_chart);
    const int n = atlas.dim();
    std::vector<double> diffs;
    diffs.reserve(samples);
    for (int s = 0; s < samples; ++s) {
      Vec x(n);
      for (int i = 0; i < n; ++i) {
        double lo = t.overlap.lower[i], hi = t.overlap.upper[i];
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
          lo = -10.0;
          hi = 10.0;
        } else if (!std::isfinite(lo)) {
          lo = hi - 10.0;
        } else if (!std::isfinite(hi)) {
          hi = lo + 10.0;
        }
        x[i] = lo + (hi - lo) * unit(rng);
      }
      diffs.push_back(from.sigma(x) - to.sigma(t.forward(x)));
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double dev = 0.0;
    for (double d : diffs) dev = std::max(dev, std::abs(d - mean));
    report.overlaps.push_back({idx, t.from_chart, t.to_chart, mean, dev, samples});
    if (!(dev <= tolerance)) report.passed = false;
  }
  return report;
}

}  // namespace lcs
