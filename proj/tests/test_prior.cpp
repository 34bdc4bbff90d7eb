#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rdlab/errors.hpp"
#include "rdlab/model.hpp"
#include "rdlab/prior.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/wavelet.hpp"

using namespace rdlab;

TEST_CASE("matern kernel: closed forms and positive definiteness") {
  // Half-integer orders have elementary expressions.
  for (double r : {0.05, 0.3, 1.0, 2.5}) {
    CHECK(matern_kernel(0.5, r) == doctest::Approx(std::exp(-r)).epsilon(1e-10));
    CHECK(matern_kernel(1.5, r) == doctest::Approx((1.0 + r) * std::exp(-r)).epsilon(1e-10));
    CHECK(matern_kernel(2.5, r) ==
          doctest::Approx((1.0 + r + r * r / 3.0) * std::exp(-r)).epsilon(1e-10));
  }
  CHECK(matern_kernel(1.5, 0.0) == 1.0);
  CHECK(matern_kernel(0.7, 0.1) > matern_kernel(0.7, 0.2));  // decreasing
  CHECK_THROWS_AS(matern_kernel(-1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(matern_kernel(1.0, -0.5), ConfigError);

  // Covariance matrices on scattered points are positive semidefinite.
  RngStream rng(88u);
  for (double nu : {0.5, 1.2, 2.5}) {
    int n = 60;
    Eigen::MatrixXd K(n, n);
    std::vector<double> pts(n);
    for (auto& p : pts) p = rng.uniform(0.0, 3.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K(i, j) = matern_kernel(nu, std::abs(pts[i] - pts[j]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("matern sampler: determinism, variance, and jitter escalation") {
  MaternSpec spec;
  spec.s = 2.0;  // nu = 1.5 in one dimension
  spec.grid = make_lattice(DomainSpec::cube(1, 0.0, 1.0), 48);
  REQUIRE(spec.grid.size() == 48);
  CHECK(spec.grid.front()[0] == 0.0);
  CHECK(spec.grid.back()[0] == 1.0);

  auto a = sample_matern(spec, 314u);
  auto b = sample_matern(spec, 314u);
  CHECK(a == b);
  CHECK(a != sample_matern(spec, 315u));

  // Marginal variance at a fixed point is K(0) = 1, checked over 10^4 draws.
  MaternSampler sampler(spec);
  RngStream rng(5150u);
  int draws = 10000;
  double m = 0.0, m2 = 0.0, cross = 0.0;
  int p = 7, q = 31;
  for (int i = 0; i < draws; ++i) {
    Vec v = sampler.draw(rng);
    m += v[p];
    m2 += v[p] * v[p];
    cross += v[p] * v[q];
  }
  m /= draws;
  double var = m2 / draws - m * m;
  double se_var = std::sqrt(2.0 / draws);  // Gaussian fourth-moment formula
  CHECK(std::abs(var - 1.0) < 3.0 * se_var);
  double r = std::abs(spec.grid[p][0] - spec.grid[q][0]);
  double cov = cross / draws - m * m;  // mean of v[q] equally ~0
  CHECK(std::abs(cov - matern_kernel(1.5, r)) < 4.0 * se_var);

  // Duplicating the whole grid makes the kernel matrix rank-deficient by
  // half; the sampler must rescue the factorization by escalating the jitter.
  MaternSpec dup = spec;
  dup.grid.insert(dup.grid.end(), spec.grid.begin(), spec.grid.end());
  dup.jitter = 0.0;
  MaternSampler rescued(dup);
  CHECK(rescued.jitter_used() > 0.0);
  RngStream rr(9u);
  for (double x : rescued.draw(rr)) CHECK(std::isfinite(x));

  MaternSpec bad;
  bad.s = 0.4;  // nu <= 0
  bad.grid = spec.grid;
  CHECK_THROWS_AS(MaternSampler{bad}, ConfigError);
  MaternSpec huge = spec;
  huge.grid.resize(5000, spec.grid[0]);
  CHECK_THROWS_AS(MaternSampler{huge}, ConfigError);
}

TEST_CASE("wavelet series prior: level variances, truncation, independence") {
  auto regions = build_nested_regions(DomainSpec::cube(1, 0.0, 1.0), 0.16);
  auto fam = build_family(2);
  auto basis = build_basis(fam, regions, 6, 7);
  WaveletPriorSpec spec;
  spec.s = 0.8;
  spec.basis = basis;

  auto c = sample_wavelet_series(spec, 99u);
  REQUIRE(c.size() == basis->size());
  CHECK(c == sample_wavelet_series(spec, 99u));
  for (const auto& ix : basis->indices) CHECK(ix.level <= 7);  // truncation at J

  // Pick one index per level and estimate variances / correlations.
  int k6 = -1, k7 = -1, k6b = -1;
  for (std::size_t k = 0; k < basis->indices.size(); ++k) {
    if (basis->indices[k].level == 6 && k6 < 0) k6 = static_cast<int>(k);
    else if (basis->indices[k].level == 6 && k6b < 0) k6b = static_cast<int>(k);
    if (basis->indices[k].level == 7 && k7 < 0) k7 = static_cast<int>(k);
  }
  REQUIRE(k6 >= 0);
  REQUIRE(k6b >= 0);
  REQUIRE(k7 >= 0);
  int draws = 10000;
  double v6 = 0.0, v7 = 0.0, c66 = 0.0, c67 = 0.0;
  for (int i = 0; i < draws; ++i) {
    auto w = sample_wavelet_series(spec, 1000u + i);
    v6 += w[k6] * w[k6];
    v7 += w[k7] * w[k7];
    c66 += w[k6] * w[k6b];
    c67 += w[k6] * w[k7];
  }
  double sd6 = std::exp2(-6.0 * spec.s), sd7 = std::exp2(-7.0 * spec.s);
  double se = std::sqrt(2.0 / draws);
  CHECK(std::abs(v6 / draws / (sd6 * sd6) - 1.0) < 3.0 * se);
  CHECK(std::abs(v7 / draws / (sd7 * sd7) - 1.0) < 3.0 * se);
  // Sample correlations vanish within 3 sigma (sigma = 1/sqrt(draws)).
  CHECK(std::abs(c66 / draws / (sd6 * sd6)) < 3.0 / std::sqrt(draws));
  CHECK(std::abs(c67 / draws / (sd6 * sd7)) < 3.0 / std::sqrt(draws));
}

TEST_CASE("rescaling: exponent arithmetic and linearity") {
  CHECK(rescale_divisor(1, 2.0, 1) == 1.0);
  CHECK(rescale_divisor(1024, 2.0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(rescale_divisor(0, 2.0, 1), ConfigError);

  std::vector<double> v{1.0, -2.0, 0.5};
  auto w = rescale(v, 1, 2.0, 1);
  CHECK(w == v);
  w = rescale(v, 1024, 2.0, 1);
  CHECK(w[1] == doctest::Approx(-1.0).epsilon(1e-12));

  // Rescaling commutes with synthesis (both are linear).
  auto regions = build_nested_regions(DomainSpec::cube(1, 0.0, 1.0), 0.16);
  auto basis = build_basis(build_family(2), regions, 6, 6);
  WaveletPriorSpec spec{0.8, basis};
  auto coeffs = sample_wavelet_series(spec, 7u);
  auto scaled = rescale(coeffs, 4096, 0.8, 1);
  Vec x{0.43};
  double a = synthesize_at(*basis, scaled, x);
  double b = synthesize_at(*basis, coeffs, x) / rescale_divisor(4096, 0.8, 1);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("rescaled amplitude composed with the link") {
  // The prior pipeline is: draw V, divide by the rescaling, feed the link.
  auto regions = build_nested_regions(DomainSpec::cube(1, 0.0, 1.0), 0.1);
  CutoffField chi(regions);
  long long N = 4096;
  double s = 0.8;
  auto v = std::make_shared<ConstantField>(1, 2.0);
  auto w = std::make_shared<ConstantField>(1, 2.0 / rescale_divisor(N, s, 1));
  LinkedField f(w, chi, 0.25);
  Vec edge{0.05};  // outside the support region: cutoff is zero
  CHECK(f.value(edge) == 1.0);
  Vec deep{0.5};  // cutoff is one here
  CHECK(f.value(deep) ==
        doctest::Approx(link_phi(2.0 / rescale_divisor(N, s, 1), 0.25)).epsilon(1e-14));
  // Everywhere in between the value stays above the link floor.
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    Vec p{t};
    CHECK(f.value(p) > 0.25);
  }
}
