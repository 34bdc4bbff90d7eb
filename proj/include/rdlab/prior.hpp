#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/wavelet.hpp"

namespace rdlab {

// Matern covariance of order nu with unit length scale, normalized so
// k(0) = 1. This is the kernel with spectral density proportional to
// (1 + |xi|^2)^{-(nu + d/2)}.
double matern_kernel(double nu, double r);

struct MaternSpec {
  double s = 2.0;          // field regularity; the process order is nu = s - d/2
  std::vector<Vec> grid;   // lattice on the domain (dense factorization)
  double jitter = 1e-10;

  int dim() const { return grid.empty() ? 0 : static_cast<int>(grid.front().size()); }
  void validate() const;   // s > d/2, 1 <= |grid| <= 4096, consistent dims
};

// Uniform lattice over a rectangle, endpoints included, n points per axis.
std::vector<Vec> make_lattice(const DomainSpec& dom, int n_per_axis);

// Dense-Cholesky sampler for the mean-zero Matern process on the spec's grid.
// A failed factorization escalates the jitter once before giving up.
class MaternSampler {
 public:
  explicit MaternSampler(MaternSpec spec);

  Vec draw(RngStream& rng) const;
  const MaternSpec& spec() const { return spec_; }
  double jitter_used() const { return jitter_used_; }

 private:
  MaternSpec spec_;
  Eigen::MatrixXd chol_;
  double jitter_used_ = 0.0;
};

// One draw on the grid; convenience wrapper that factorizes per call.
Vec sample_matern(const MaternSpec& spec, std::uint64_t seed);

struct WaveletPriorSpec {
  double s = 1.0;
  BasisPtr basis;

  void validate() const;
};

// Coefficients 2^{-ls} g_lr with g_lr iid standard normal, one per basis
// index (the base scaling functions count as level J0).
CoeffVector sample_wavelet_series(const WaveletPriorSpec& spec, std::uint64_t seed);

// The prior rescaling W = V / N^{d/(4s+2d)}. The link phi and the composed
// diffusivity live in the model module (link_phi / LinkedField); priors here
// produce the raw amplitude V, and W feeds the link after this division.
double rescale_divisor(long long N, double s, int d);
std::vector<double> rescale(const std::vector<double>& v, long long N, double s, int d);

}  // namespace rdlab
