#include "rdlab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "rdlab/errors.hpp"

namespace rdlab {

void SdeConfig::validate() const {
  if (!f) throw ConfigError("sde: diffusivity field is required");
  if (!(D > 0.0)) throw ConfigError("sde: sampling interval D must be positive");
  if (N < 1) throw ConfigError("sde: need at least one observed increment");
  if (substeps < 1) throw ConfigError("sde: substep count must be at least 1");
  if (regions.domain.dim <= 0) throw ConfigError("sde: regions are not initialized");
  if (f->dim() != regions.domain.dim)
    throw ConfigError("sde: field dimension does not match the domain");
  if (drift_mode == DriftMode::generic) {
    if (static_cast<int>(drift_g.size()) != regions.domain.dim)
      throw ConfigError("sde: generic drift needs one component field per axis");
    for (const auto& g : drift_g)
      if (!g || g->dim() != regions.domain.dim)
        throw ConfigError("sde: generic drift component has wrong dimension");
  }
}

int suggest_substeps(double D, double delta, double f_sup) {
  if (!(D > 0.0) || !(delta > 0.0) || !(f_sup > 0.0))
    throw ConfigError("suggest_substeps: all arguments must be positive");
  // Resolve the boundary layer: one Euler step should not jump across a
  // band of width delta/10 at the top diffusivity.
  double dt_max = std::min(D, (delta / 10.0) * (delta / 10.0) / (2.0 * f_sup));
  return static_cast<int>(std::max(1.0, std::ceil(D / dt_max)));
}

Vec initial_draw(const DomainSpec& dom, RngStream& rng, long long* attempts) {
  if (dom.kind == DomainSpec::Kind::rectangle) {
    Vec x(dom.dim);
    for (int j = 0; j < dom.dim; ++j) x[j] = rng.uniform(dom.lower[j], dom.upper[j]);
    if (attempts) *attempts += 1;
    return x;
  }
  // Ball: rejection from the enclosing box.
  Vec x(dom.dim);
  for (;;) {
    if (attempts) *attempts += 1;
    for (int j = 0; j < dom.dim; ++j)
      x[j] = rng.uniform(dom.center[j] - dom.radius, dom.center[j] + dom.radius);
    if (contains(dom, x)) return x;
  }
}

namespace {

// One Euler substep shared by sample_path and boundary_hit_frequency.
// Returns true when the proposal left the domain (a boundary contact).
bool euler_substep(const SdeConfig& cfg, double dt, Vec& x, Vec& drift, Vec& scratch,
                   RngStream& rng) {
  const int d = cfg.regions.domain.dim;
  double fx = cfg.f->value(x);
  if (!std::isfinite(fx) || fx <= 0.0) {
    std::string where = "(";
    for (int j = 0; j < d; ++j) where += (j ? "," : "") + std::to_string(x[j]);
    throw NumericError("sde: diffusivity is not positive at " + where + ")");
  }
  switch (cfg.drift_mode) {
    case DriftMode::gradient:
      cfg.f->gradient(x, drift);
      break;
    case DriftMode::generic:
      for (int j = 0; j < d; ++j) drift[j] = cfg.drift_g[j]->value(x);
      break;
    case DriftMode::none:
      std::fill(drift.begin(), drift.end(), 0.0);
      break;
  }
  const double scale = std::sqrt(2.0 * fx * dt);
  for (int j = 0; j < d; ++j) scratch[j] = x[j] + drift[j] * dt + scale * rng.normal();
  if (contains(cfg.regions.domain, scratch)) {
    x.swap(scratch);
    return false;
  }
  project_to_domain(cfg.regions.domain, scratch);
  x.swap(scratch);
  return true;
}

}  // namespace

ObservationSet sample_path(const SdeConfig& cfg) {
  cfg.validate();
  const int d = cfg.regions.domain.dim;
  const double dt = cfg.D / cfg.substeps;
  RngStream rng = RngStream::substream(cfg.seed, 0xd1f5, 0);

  ObservationSet obs;
  obs.D = cfg.D;
  obs.seed = cfg.seed;
  obs.points.reserve(static_cast<std::size_t>(cfg.N) + 1);

  Vec x = initial_draw(cfg.regions.domain, rng);
  obs.points.push_back(x);
  Vec drift(d, 0.0), scratch(d, 0.0);
  for (long long i = 0; i < cfg.N; ++i) {
    for (int s = 0; s < cfg.substeps; ++s) euler_substep(cfg, dt, x, drift, scratch, rng);
    obs.points.push_back(x);
  }
  return obs;
}

std::vector<double> increments_Y(const ObservationSet& obs) {
  const long long n = obs.n_increments();
  if (n < 1) throw ConfigError("increments: need at least two observed states");
  const int d = obs.dim();
  std::vector<double> y(static_cast<std::size_t>(n));
  const double denom = 2.0 * d * obs.D;
  for (long long i = 1; i <= n; ++i) {
    double s2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double dx = obs.points[i][j] - obs.points[i - 1][j];
      s2 += dx * dx;
    }
    y[static_cast<std::size_t>(i - 1)] = s2 / denom;
  }
  return y;
}

double boundary_hit_frequency(const SdeConfig& cfg, const DomainSpec& start_region) {
  cfg.validate();
  if (start_region.dim != cfg.regions.domain.dim)
    throw ConfigError("hit frequency: start region dimension mismatch");
  const int d = cfg.regions.domain.dim;
  const double dt = cfg.D / cfg.substeps;
  RngStream rng = RngStream::substream(cfg.seed, 0xb07, 1);

  // The starts are supposed to sit well inside the domain; spot-check.
  for (int t = 0; t < 32; ++t) {
    Vec p = initial_draw(start_region, rng);
    if (!cfg.regions.in_O0_delta(p))
      throw ConfigError("hit frequency: start region leaves the enlarged support region");
  }

  long long hits = 0;
  Vec drift(d, 0.0), scratch(d, 0.0);
  for (long long i = 0; i < cfg.N; ++i) {
    Vec x = initial_draw(start_region, rng);
    bool hit = false;
    for (int s = 0; s < cfg.substeps; ++s)
      if (euler_substep(cfg, dt, x, drift, scratch, rng)) hit = true;
    hits += hit ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(cfg.N);
}

PathDiagnostics occupation_histogram(const ObservationSet& obs, int bins,
                                     const DomainSpec* dom) {
  if (bins < 1) throw ConfigError("histogram: need at least one bin per axis");
  if (obs.points.empty()) throw ConfigError("histogram: empty observation set");
  const int d = obs.dim();

  Vec lo, hi;
  if (dom) {
    if (dom->dim != d) throw ConfigError("histogram: domain dimension mismatch");
    if (dom->kind == DomainSpec::Kind::rectangle) {
      lo = dom->lower;
      hi = dom->upper;
    } else {
      lo.resize(d);
      hi.resize(d);
      for (int j = 0; j < d; ++j) {
        lo[j] = dom->center[j] - dom->radius;
        hi[j] = dom->center[j] + dom->radius;
      }
    }
  } else {
    // No domain given: use the tight box around the data.
    lo = hi = obs.points.front();
    for (const auto& p : obs.points)
      for (int j = 0; j < d; ++j) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
  }

  PathDiagnostics diag;
  diag.bins_per_axis = bins;
  diag.states = static_cast<long long>(obs.points.size());
  std::size_t cells = 1;
  for (int j = 0; j < d; ++j) cells *= static_cast<std::size_t>(bins);
  diag.histogram.assign(cells, 0.0);

  const double mass = 1.0 / static_cast<double>(obs.points.size());
  for (const auto& p : obs.points) {
    std::size_t idx = 0;
    for (int j = 0; j < d; ++j) {
      double w = hi[j] - lo[j];
      int b = w > 0.0 ? static_cast<int>((p[j] - lo[j]) / w * bins) : 0;
      b = std::clamp(b, 0, bins - 1);
      idx = idx * static_cast<std::size_t>(bins) + static_cast<std::size_t>(b);
    }
    diag.histogram[idx] += mass;
  }

  if (obs.n_increments() >= 1) {
    double sum = 0.0, sum2 = 0.0;
    long long count = 0;
    for (std::size_t i = 1; i < obs.points.size(); ++i)
      for (int j = 0; j < d; ++j) {
        double dx = obs.points[i][j] - obs.points[i - 1][j];
        sum += dx;
        sum2 += dx * dx;
        ++count;
      }
    diag.increment_mean = sum / static_cast<double>(count);
    diag.increment_var =
        sum2 / static_cast<double>(count) - diag.increment_mean * diag.increment_mean;
  }

  if (dom)
    for (const auto& p : obs.points)
      if (on_boundary(*dom, p, 1e-12)) ++diag.boundary_hits;
  return diag;
}

}  // namespace rdlab
