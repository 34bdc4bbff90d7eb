#include "rdlab/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rdlab/errors.hpp"
#include "rdlab/rng.hpp"

namespace rdlab {

namespace {

double checked_f(const ScalarField& f, std::span<const double> x, double D) {
  double v = f.value(x);
  if (!std::isfinite(v) || v <= 0.0) {
    std::string where;
    for (double c : x) where += (where.empty() ? "" : ", ") + std::to_string(c);
    throw NumericError("proxy likelihood: diffusivity is not positive at (" + where + ")");
  }
  if (!(D > 0.0)) throw ConfigError("proxy likelihood: sampling interval must be positive");
  return v;
}

double log_q_value(double fx, double d, double D, double dist2) {
  return -0.5 * d * std::log(4.0 * std::numbers::pi * D * fx) - dist2 / (4.0 * D * fx);
}

double dist2(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = y[i] - x[i];
    s += d * d;
  }
  return s;
}

}  // namespace

void ProxyModel::validate() const {
  if (!f) throw ConfigError("proxy likelihood: diffusivity field is required");
  if (!(D > 0.0)) throw ConfigError("proxy likelihood: sampling interval must be positive");
}

double log_q(const ProxyModel& model, std::span<const double> x, std::span<const double> y) {
  model.validate();
  if (x.size() != y.size() || static_cast<int>(x.size()) != model.f->dim())
    throw ConfigError("proxy likelihood: point dimension mismatch");
  double fx = checked_f(*model.f, x, model.D);
  return log_q_value(fx, static_cast<double>(x.size()), model.D, dist2(x, y));
}

double proxy_loglik(const ProxyModel& model, const ObservationSet& obs,
                    const NestedRegions& regions, bool restrict_interior) {
  model.validate();
  if (obs.n_increments() < 1) throw ConfigError("proxy likelihood: need at least two observations");
  if (obs.dim() != model.f->dim()) throw ConfigError("proxy likelihood: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 1; i < obs.points.size(); ++i) {
    const Vec& x = obs.points[i - 1];
    if (restrict_interior && !regions.in_O0_delta(x)) continue;
    double fx = checked_f(*model.f, x, model.D);
    total += log_q_value(fx, static_cast<double>(x.size()), model.D, dist2(x, obs.points[i]));
  }
  return total;
}

double loglik_ratio(const ScalarField& f, const ScalarField& f0, double D,
                    const ObservationSet& obs, const NestedRegions& regions) {
  if (obs.n_increments() < 1) throw ConfigError("proxy likelihood: need at least two observations");
  if (obs.dim() != f.dim() || obs.dim() != f0.dim())
    throw ConfigError("proxy likelihood: dimension mismatch");
  double d = static_cast<double>(obs.dim());
  double total = 0.0;
  for (std::size_t i = 1; i < obs.points.size(); ++i) {
    const Vec& x = obs.points[i - 1];
    if (!regions.in_O0_delta(x)) continue;
    double fx = checked_f(f, x, D);
    double f0x = checked_f(f0, x, D);
    double r2 = dist2(x, obs.points[i]);
    total += log_q_value(fx, d, D, r2) - log_q_value(f0x, d, D, r2);
  }
  return total;
}

KlEstimate mc_transition_kl(const ScalarField& f0, const ScalarField& f, double D,
                            const DomainSpec& dom, long long n_mc, std::uint64_t seed,
                            long long n_sum) {
  if (f.dim() != f0.dim() || f.dim() != dom.dim)
    throw ConfigError("transition divergence: dimension mismatch");
  if (n_mc < 2) throw ConfigError("transition divergence: need at least two draws");
  if (n_sum < 1 || (n_sum > 1 && n_mc / n_sum < 2))
    throw ConfigError("transition divergence: group size leaves fewer than two groups");
  if (!(D > 0.0)) throw ConfigError("transition divergence: sampling interval must be positive");

  KlEstimate out;
  out.n_mc = n_mc;
  out.n_sum = n_sum;

  int d = dom.dim;
  double dd = static_cast<double>(d);
  RngStream rng = RngStream::substream(seed, 0x41e5, 2);
  Vec y(d);

  // Welford accumulators for single ratios and for group sums.
  long long groups = n_mc / n_sum;
  double mean1 = 0.0, m2_1 = 0.0;
  double mean_g = 0.0, m2_g = 0.0;
  long long n1 = 0, ng = 0;
  double group_acc = 0.0;
  long long in_group = 0;

  for (long long i = 0; i < groups * n_sum; ++i) {
    Vec start = uniform_in_domain(dom, rng);
    double f0x = checked_f(f0, start, D);
    double sd = std::sqrt(2.0 * D * f0x);
    for (int k = 0; k < d; ++k) y[k] = start[k] + sd * rng.normal();
    double fx = checked_f(f, start, D);
    double r2 = dist2(start, y);
    // log q_{f0} - log q_f in closed form; exactly zero when the fields agree.
    double ratio = 0.5 * dd * std::log(fx / f0x) + r2 / (4.0 * D) * (1.0 / fx - 1.0 / f0x);

    ++n1;
    double d1 = ratio - mean1;
    mean1 += d1 / static_cast<double>(n1);
    m2_1 += d1 * (ratio - mean1);

    group_acc += ratio;
    if (++in_group == n_sum) {
      ++ng;
      double dg = group_acc - mean_g;
      mean_g += dg / static_cast<double>(ng);
      m2_g += dg * (group_acc - mean_g);
      group_acc = 0.0;
      in_group = 0;
    }
  }

  double var1 = m2_1 / static_cast<double>(n1 - 1);
  out.mean_per_transition = mean1;
  out.stderr_mean = std::sqrt(var1 / static_cast<double>(n1));
  out.var_sum = (ng > 1) ? m2_g / static_cast<double>(ng - 1) : var1;

  // Sup-norm separation of the two fields, probed on a lattice.
  int probes = (d == 1) ? 4097 : (d == 2 ? 65 : 17);
  Vec lo(d), hi(d);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    lo = dom.lower;
    hi = dom.upper;
  } else {
    for (int k = 0; k < d; ++k) {
      lo[k] = dom.center[k] - dom.radius;
      hi[k] = dom.center[k] + dom.radius;
    }
  }
  std::vector<int> idx(d, 0);
  Vec p(d);
  double sup = 0.0;
  while (true) {
    for (int k = 0; k < d; ++k)
      p[k] = lo[k] + (hi[k] - lo[k]) * (idx[k] + 0.5) / probes;
    if (contains(dom, p)) sup = std::max(sup, std::abs(f.value(p) - f0.value(p)));
    int axis = 0;
    while (axis < d && ++idx[axis] == probes) idx[axis++] = 0;
    if (axis == d) break;
  }
  out.sup_distance = sup;
  return out;
}

}  // namespace rdlab
