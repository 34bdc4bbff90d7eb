#include "rdlab/prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rdlab/errors.hpp"

namespace rdlab {

double matern_kernel(double nu, double r) {
  if (!(nu > 0.0)) throw ConfigError("matern kernel: order must be positive");
  if (r < 0.0 || !std::isfinite(r)) throw ConfigError("matern kernel: bad distance");
  if (r == 0.0) return 1.0;
  // 2^{1-nu}/Gamma(nu) r^nu K_nu(r); underflows cleanly to 0 for large r.
  double lg = std::lgamma(nu);
  double val = std::exp((1.0 - nu) * std::numbers::ln2 - lg + nu * std::log(r)) *
               std::cyl_bessel_k(nu, r);
  return std::isfinite(val) ? val : 0.0;
}

void MaternSpec::validate() const {
  if (grid.empty()) throw ConfigError("matern prior: grid is empty");
  if (grid.size() > 4096)
    throw ConfigError("matern prior: grid too large for dense factorization");
  int d = dim();
  if (!(s > 0.5 * d)) throw ConfigError("matern prior: need s > d/2 for positive order");
  if (jitter < 0.0) throw ConfigError("matern prior: jitter must be non-negative");
  for (const Vec& p : grid)
    if (static_cast<int>(p.size()) != d) throw ConfigError("matern prior: ragged grid");
}

std::vector<Vec> make_lattice(const DomainSpec& dom, int n_per_axis) {
  if (dom.kind != DomainSpec::Kind::rectangle)
    throw ConfigError("lattice construction expects a rectangle");
  if (n_per_axis < 1) throw ConfigError("lattice needs at least one point per axis");
  int d = dom.dim;
  std::vector<Vec> pts;
  std::vector<int> idx(d, 0);
  Vec p(d);
  while (true) {
    for (int k = 0; k < d; ++k) {
      double lo = dom.lower[k], hi = dom.upper[k];
      p[k] = (n_per_axis == 1) ? 0.5 * (lo + hi)
                               : lo + (hi - lo) * idx[k] / (n_per_axis - 1.0);
    }
    pts.push_back(p);
    int axis = 0;
    while (axis < d && ++idx[axis] == n_per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  return pts;
}

MaternSampler::MaternSampler(MaternSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  int n = static_cast<int>(spec_.grid.size());
  int d = spec_.dim();
  double nu = spec_.s - 0.5 * d;
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        double diff = spec_.grid[i][k] - spec_.grid[j][k];
        r2 += diff * diff;
      }
      K(i, j) = K(j, i) = matern_kernel(nu, std::sqrt(r2));
    }
  }
  double jit = spec_.jitter;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(K + jit * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      jitter_used_ = jit;
      return;
    }
    jit = std::max(jit * 1e3, 1e-8);
  }
  throw NumericError("matern prior: covariance factorization failed even with escalated jitter");
}

Vec MaternSampler::draw(RngStream& rng) const {
  int n = static_cast<int>(spec_.grid.size());
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = rng.normal();
  Eigen::VectorXd v = chol_ * z;
  return Vec(v.data(), v.data() + n);
}

Vec sample_matern(const MaternSpec& spec, std::uint64_t seed) {
  MaternSampler sampler(spec);
  RngStream rng = RngStream::substream(seed, 0x3a7e, 0);
  return sampler.draw(rng);
}

void WaveletPriorSpec::validate() const {
  if (!basis) throw ConfigError("wavelet prior: basis is required");
  if (!(s > 0.0)) throw ConfigError("wavelet prior: smoothness must be positive");
}

CoeffVector sample_wavelet_series(const WaveletPriorSpec& spec, std::uint64_t seed) {
  spec.validate();
  RngStream rng = RngStream::substream(seed, 0x3a7e, 1);
  CoeffVector c(spec.basis->size());
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = std::exp2(-static_cast<double>(spec.basis->indices[k].level) * spec.s) * rng.normal();
  return c;
}

double rescale_divisor(long long N, double s, int d) {
  if (N < 1) throw ConfigError("rescaling: sample count must be at least 1");
  if (!(s > 0.0) || d < 1) throw ConfigError("rescaling: bad smoothness or dimension");
  return std::pow(static_cast<double>(N), d / (4.0 * s + 2.0 * d));
}

std::vector<double> rescale(const std::vector<double>& v, long long N, double s, int d) {
  double div = rescale_divisor(N, s, d);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / div;
  return out;
}

}  // namespace rdlab
