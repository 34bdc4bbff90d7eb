#include "rdlab/geodesic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Knots stored flat: knot j occupies [j*d, (j+1)*d). Endpoints are fixed.
double path_energy(const ScalarField& f, const std::vector<double>& knots, int n, int d,
                   std::vector<double>& mid) {
  double h = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double* a = knots.data() + j * d;
    const double* b = a + d;
    double seg2 = 0.0;
    for (int k = 0; k < d; ++k) {
      mid[k] = 0.5 * (a[k] + b[k]);
      double dk = b[k] - a[k];
      seg2 += dk * dk;
    }
    double fm = f.value(std::span<const double>(mid.data(), d));
    if (!std::isfinite(fm) || fm <= 0.0)
      throw NumericError("geodesic: diffusivity is not positive along the path");
    acc += seg2 / (h * fm);
  }
  return acc;
}

// dE/dg_j for interior knots. Each knot touches two segments; the metric term
// contributes through the midpoints on both sides.
void path_gradient(const ScalarField& f, const std::vector<double>& knots, int n, int d,
                   std::vector<double>& grad, std::vector<double>& mid,
                   std::vector<double>& gf) {
  double h = 1.0 / static_cast<double>(n);
  std::fill(grad.begin(), grad.end(), 0.0);
  for (int j = 0; j < n; ++j) {
    const double* a = knots.data() + j * d;
    const double* b = a + d;
    double seg2 = 0.0;
    for (int k = 0; k < d; ++k) {
      mid[k] = 0.5 * (a[k] + b[k]);
      double dk = b[k] - a[k];
      seg2 += dk * dk;
    }
    std::span<const double> m(mid.data(), static_cast<std::size_t>(d));
    double fm = f.value(m);
    f.gradient(m, std::span<double>(gf.data(), static_cast<std::size_t>(d)));
    double inv = 1.0 / (h * fm);
    double metric = -0.5 * seg2 * inv / fm;  // d/dm of seg2/(h f(m)), per unit grad f
    for (int k = 0; k < d; ++k) {
      double lin = 2.0 * (b[k] - a[k]) * inv;
      double met = metric * gf[k];
      if (j > 0) grad[(j - 1) * d + k] += -lin + met;      // knot a is interior index j-1
      if (j < n - 1) grad[j * d + k] += lin + met;         // knot b is interior index j
    }
  }
}

}  // namespace

double geodesic_distance(const ScalarField& f, std::span<const double> x,
                         std::span<const double> y, const GeodesicSolverSpec& spec) {
  int d = f.dim();
  if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
    throw ConfigError("geodesic: endpoint dimension mismatch");
  if (spec.path_points < 2) throw ConfigError("geodesic: need at least two path segments");
  if (spec.max_iters < 1 || !(spec.step > 0.0) || !(spec.tol > 0.0))
    throw ConfigError("geodesic: solver controls must be positive");

  int n = spec.path_points;
  // Straight-line initial path, endpoints included.
  std::vector<double> knots(static_cast<std::size_t>(n + 1) * d);
  for (int j = 0; j <= n; ++j) {
    double t = static_cast<double>(j) / n;
    for (int k = 0; k < d; ++k) knots[j * d + k] = (1.0 - t) * x[k] + t * y[k];
  }

  std::vector<double> mid(d), gf(d);
  std::vector<double> grad(static_cast<std::size_t>(n - 1) * d);
  std::vector<double> trial = knots;

  double energy = path_energy(f, knots, n, d, mid);
  double step = spec.step;
  double grad_norm = 0.0;
  for (int it = 0; it < spec.max_iters; ++it) {
    path_gradient(f, knots, n, d, grad, mid, gf);
    grad_norm = 0.0;
    for (double g : grad) grad_norm += g * g;
    grad_norm = std::sqrt(grad_norm);

    // Backtracking: shrink until the move actually lowers the energy.
    double improved = -1.0;
    while (step > 1e-15) {
      for (int j = 1; j < n; ++j)
        for (int k = 0; k < d; ++k)
          trial[j * d + k] = knots[j * d + k] - step * grad[(j - 1) * d + k];
      double e = path_energy(f, trial, n, d, mid);
      if (e < energy) {
        improved = e;
        break;
      }
      step *= 0.5;
    }
    if (improved < 0.0) break;  // no descent direction left at machine scale
    knots.swap(trial);
    double drop = energy - improved;
    energy = improved;
    step *= 1.2;
    if (drop <= spec.tol * std::max(1.0, energy)) return std::sqrt(energy);
  }
  if (grad_norm * step > spec.tol * std::max(1.0, energy) * 1e3)
    throw NumericError("geodesic: descent did not settle after " +
                       std::to_string(spec.max_iters) +
                       " iterations (residual gradient norm " + std::to_string(grad_norm) + ")");
  return std::sqrt(energy);
}

double geodesic_expansion(const ScalarField& f, std::span<const double> x,
                          std::span<const double> y) {
  int d = f.dim();
  if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
    throw ConfigError("geodesic: endpoint dimension mismatch");
  double fx = f.value(x);
  if (!std::isfinite(fx) || fx <= 0.0)
    throw NumericError("geodesic: diffusivity is not positive at the base point");
  std::vector<double> gf(d);
  f.gradient(x, gf);
  double r2 = 0.0, dir = 0.0;
  for (int k = 0; k < d; ++k) {
    double dk = y[k] - x[k];
    r2 += dk * dk;
    dir += gf[k] * dk;  // grad f . (y - x)
  }
  // grad(1/f) = -grad f / f^2, contracted with the displacement.
  return r2 / fx - 0.5 * r2 * dir / (fx * fx);
}

}  // namespace rdlab
