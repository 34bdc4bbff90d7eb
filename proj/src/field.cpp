#include "rdlab/field.hpp"

#include <cmath>
#include <numbers>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {
// Step sizes balancing truncation against round-off for each stencil order.
double fd_step(int order) {
  static const double h[5] = {0.0, 6e-6, 1.2e-4, 7.4e-4, 2.5e-3};
  return h[order];
}
}  // namespace

void ScalarField::gradient(std::span<const double> x, std::span<double> g) const {
  Vec y(x.begin(), x.end());
  const double h = fd_step(1);
  for (int i = 0; i < dim(); ++i) {
    double xi = y[i];
    y[i] = xi + h;
    double fp = value(y);
    y[i] = xi - h;
    double fm = value(y);
    y[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
}

double ScalarField::partial(std::span<const double> x, int axis, int order) const {
  if (order < 1 || order > 4) throw ConfigError("partial: order must be 1..4");
  Vec y(x.begin(), x.end());
  const double h = fd_step(order);
  auto at = [&](double off) {
    y[axis] = x[axis] + off;
    return value(y);
  };
  switch (order) {
    case 1:
      return (at(h) - at(-h)) / (2.0 * h);
    case 2:
      return (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
    case 3:
      return (at(2 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2 * h)) / (2.0 * h * h * h);
    default:
      return (at(2 * h) - 4.0 * at(h) + 6.0 * at(0.0) - 4.0 * at(-h) + at(-2 * h)) /
             (h * h * h * h);
  }
}

CosBumpField::CosBumpField(NestedRegions regions, double base, double amp, double freq,
                           Vec center)
    : cutoff_(regions), base_(base), amp_(amp), freq_(freq), center_(std::move(center)) {
  if (center_.empty()) center_ = Vec(regions.domain.dim, 0.0);
  if (static_cast<int>(center_.size()) != regions.domain.dim)
    throw ConfigError("bump center dimension mismatch");
}

double CosBumpField::value(std::span<const double> x) const {
  double c = cutoff_.value(x);
  if (c == 0.0) return base_;
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    p *= std::cos(2.0 * std::numbers::pi * freq_ * (x[i] - center_[i]));
  return base_ + amp_ * c * p;
}

GridField::GridField(Vec lo, Vec hi, std::vector<int> n_per_axis, std::vector<double> values)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(n_per_axis)), v_(std::move(values)) {
  if (lo_.size() != hi_.size() || lo_.size() != n_.size())
    throw ConfigError("grid field: axis spec sizes disagree");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n_.size(); ++i) {
    if (n_[i] < 2 || !(lo_[i] < hi_[i])) throw ConfigError("grid field: bad axis");
    total *= static_cast<std::size_t>(n_[i]);
  }
  if (v_.size() != total) throw ConfigError("grid field: value count mismatch");
}

double GridField::value(std::span<const double> x) const {
  const int d = dim();
  // Locate the cell and the within-cell weights, clamping outside the box.
  std::vector<int> i0(d);
  std::vector<double> w(d);
  for (int i = 0; i < d; ++i) {
    double t = (x[i] - lo_[i]) / (hi_[i] - lo_[i]) * (n_[i] - 1);
    t = std::clamp(t, 0.0, static_cast<double>(n_[i] - 1));
    int c = std::min(static_cast<int>(t), n_[i] - 2);
    i0[i] = c;
    w[i] = t - c;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double wt = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) {
      int bit = (corner >> i) & 1;
      wt *= bit ? w[i] : 1.0 - w[i];
      idx = idx * static_cast<std::size_t>(n_[i]) + static_cast<std::size_t>(i0[i] + bit);
    }
    acc += wt * v_[idx];
  }
  return acc;
}

GridField GridField::sample(const ScalarField& f, Vec lo, Vec hi, std::vector<int> n_per_axis) {
  const int d = static_cast<int>(lo.size());
  std::size_t total = 1;
  for (int n : n_per_axis) total *= static_cast<std::size_t>(n);
  std::vector<double> vals(total);
  Vec x(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int i = d - 1; i >= 0; --i) {
      std::size_t n = static_cast<std::size_t>(n_per_axis[i]);
      std::size_t k = rem % n;
      rem /= n;
      x[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(k) / (n_per_axis[i] - 1);
    }
    vals[flat] = f.value(x);
  }
  return GridField(std::move(lo), std::move(hi), std::move(n_per_axis), std::move(vals));
}

}  // namespace rdlab
