#include "rdlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

double norm_from(std::span<const double> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_dim(const DomainSpec& dom, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dom.dim)
    throw ConfigError("point dimension does not match domain dimension");
}

}  // namespace

DomainSpec DomainSpec::rectangle(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw ConfigError("rectangle needs matching non-empty bound vectors");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ConfigError("rectangle bounds must satisfy lower < upper");
  DomainSpec d;
  d.kind = Kind::rectangle;
  d.dim = static_cast<int>(lo.size());
  d.lower = std::move(lo);
  d.upper = std::move(hi);
  return d;
}

DomainSpec DomainSpec::cube(int d, double lo, double hi) {
  if (d < 1) throw ConfigError("dimension must be at least 1");
  return rectangle(Vec(d, lo), Vec(d, hi));
}

DomainSpec DomainSpec::ball(Vec c, double r) {
  if (c.empty()) throw ConfigError("ball center must be non-empty");
  if (!(r > 0.0)) throw ConfigError("ball radius must be positive");
  DomainSpec d;
  d.kind = Kind::ball;
  d.dim = static_cast<int>(c.size());
  d.center = std::move(c);
  d.radius = r;
  return d;
}

bool contains(const DomainSpec& dom, std::span<const double> x) {
  check_dim(dom, x);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < dom.dim; ++i)
      if (x[i] < dom.lower[i] || x[i] > dom.upper[i]) return false;
    return true;
  }
  return norm_from(x, dom.center) <= dom.radius;
}

double boundary_distance(const DomainSpec& dom, std::span<const double> x) {
  check_dim(dom, x);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dom.dim; ++i)
      m = std::min(m, std::min(x[i] - dom.lower[i], dom.upper[i] - x[i]));
    return m;
  }
  return dom.radius - norm_from(x, dom.center);
}

void project_to_domain(const DomainSpec& dom, std::span<double> x) {
  check_dim(dom, x);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < dom.dim; ++i) x[i] = std::clamp(x[i], dom.lower[i], dom.upper[i]);
    return;
  }
  double r = norm_from(x, dom.center);
  if (r > dom.radius) {
    double s = dom.radius / r;
    for (int i = 0; i < dom.dim; ++i) x[i] = dom.center[i] + s * (x[i] - dom.center[i]);
    // round-off can leave the image a hair outside; nudge it back in
    double r2 = norm_from(x, dom.center);
    if (r2 > dom.radius) {
      double s2 = (dom.radius / r2) * (1.0 - 1e-15);
      for (int i = 0; i < dom.dim; ++i) x[i] = dom.center[i] + s2 * (x[i] - dom.center[i]);
    }
  }
}

Vec projected(const DomainSpec& dom, std::span<const double> x) {
  Vec y(x.begin(), x.end());
  project_to_domain(dom, y);
  return y;
}

bool on_boundary(const DomainSpec& dom, std::span<const double> x, double tol) {
  double d = boundary_distance(dom, x);
  return std::abs(d) <= tol;
}

Vec inward_normal(const DomainSpec& dom, std::span<const double> x, double tol) {
  check_dim(dom, x);
  Vec n(dom.dim, 0.0);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < dom.dim; ++i) {
      if (std::abs(x[i] - dom.lower[i]) <= tol) n[i] += 1.0;
      if (std::abs(x[i] - dom.upper[i]) <= tol) n[i] -= 1.0;
    }
  } else {
    double r = norm_from(x, dom.center);
    if (std::abs(r - dom.radius) > tol || r == 0.0)
      throw ConfigError("inward_normal: point is not on the ball boundary");
    for (int i = 0; i < dom.dim; ++i) n[i] = (dom.center[i] - x[i]) / r;
    return n;
  }
  double s = 0.0;
  for (double v : n) s += v * v;
  if (s == 0.0) throw ConfigError("inward_normal: point is not on the rectangle boundary");
  s = std::sqrt(s);
  for (double& v : n) v /= s;
  return n;
}

Vec uniform_in_domain(const DomainSpec& dom, RngStream& rng) {
  Vec x(dom.dim);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < dom.dim; ++i) x[i] = rng.uniform(dom.lower[i], dom.upper[i]);
    return x;
  }
  // Isotropic direction, radius R u^{1/d}.
  double s;
  do {
    s = 0.0;
    for (int i = 0; i < dom.dim; ++i) {
      x[i] = rng.normal();
      s += x[i] * x[i];
    }
  } while (s == 0.0);
  double r = dom.radius * std::pow(rng.uniform01(), 1.0 / dom.dim) / std::sqrt(s);
  for (int i = 0; i < dom.dim; ++i) x[i] = dom.center[i] + r * x[i];
  return x;
}

double domain_volume(const DomainSpec& dom) {
  if (dom.kind == DomainSpec::Kind::rectangle) {
    double v = 1.0;
    for (int i = 0; i < dom.dim; ++i) v *= dom.upper[i] - dom.lower[i];
    return v;
  }
  double d = dom.dim;
  return std::pow(std::numbers::pi, d / 2.0) * std::pow(dom.radius, d) / std::tgamma(d / 2.0 + 1.0);
}

namespace {

DomainSpec inset(const DomainSpec& dom, double amount) {
  if (dom.kind == DomainSpec::Kind::rectangle) {
    Vec lo = dom.lower, hi = dom.upper;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] += amount;
      hi[i] -= amount;
      if (!(lo[i] < hi[i])) throw ConfigError("domain too small for the requested inset");
    }
    return DomainSpec::rectangle(std::move(lo), std::move(hi));
  }
  if (!(dom.radius > amount)) throw ConfigError("domain too small for the requested inset");
  return DomainSpec::ball(dom.center, dom.radius - amount);
}

}  // namespace

bool NestedRegions::in_K(std::span<const double> x) const {
  return boundary_distance(K, x) >= 0.0;
}
bool NestedRegions::in_O0(std::span<const double> x) const {
  return boundary_distance(O0, x) > 0.0;
}
bool NestedRegions::in_O0_delta(std::span<const double> x) const {
  return boundary_distance(O0_delta, x) > 0.0;
}

NestedRegions build_nested_regions(const DomainSpec& dom, double delta) {
  if (!(delta > 0.0)) throw ConfigError("region margin delta must be positive");
  NestedRegions r;
  r.domain = dom;
  r.delta = delta;
  r.K = inset(dom, 3.0 * delta);
  r.O0 = inset(dom, 2.0 * delta);
  r.O0_delta = inset(dom, 1.5 * delta);
  return r;
}

CutoffField::CutoffField(const NestedRegions& regions) : regions_(regions) {
  double delta = regions_.delta;
  // max |S'| = 140/64, max |S''| ~ 7.51 over the unit transition band.
  const double s1 = 2.1875, s2 = 7.52;
  if (regions_.domain.kind == DomainSpec::Kind::rectangle) {
    deriv_bound_ = 1.05 * s1 / delta;
    second_deriv_bound_ = 1.05 * std::max(s2, s1 * s1) / (delta * delta);
  } else {
    // Radial profile: curvature adds (d-1)/rho * S'/delta to the Hessian;
    // chi varies only where rho >= R - 3 delta.
    double rho_min = regions_.domain.radius - 3.0 * delta;
    deriv_bound_ = 1.05 * s1 / delta;
    second_deriv_bound_ =
        1.05 * (s2 / (delta * delta) +
                (regions_.domain.dim - 1) * s1 / (delta * rho_min));
  }
}

double CutoffField::value(std::span<const double> x) const {
  const DomainSpec& dom = regions_.domain;
  check_dim(dom, x);
  double delta = regions_.delta;
  if (dom.kind == DomainSpec::Kind::rectangle) {
    double v = 1.0;
    for (int i = 0; i < dom.dim; ++i) {
      v *= detail::smoothstep7((x[i] - dom.lower[i] - 2.0 * delta) / delta);
      if (v == 0.0) return 0.0;
      v *= detail::smoothstep7((dom.upper[i] - 2.0 * delta - x[i]) / delta);
      if (v == 0.0) return 0.0;
    }
    return v;
  }
  double rho = norm_from(x, dom.center);
  return detail::smoothstep7((dom.radius - 2.0 * delta - rho) / delta);
}

}  // namespace rdlab
