#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rdlab/errors.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/rng.hpp"

using namespace rdlab;

namespace {

Vec random_point(RngStream& rng, int d, double lo, double hi) {
  Vec x(d);
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

double dist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("construction rejects bad specs") {
  CHECK_THROWS_AS(DomainSpec::rectangle({0.0, 0.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(DomainSpec::rectangle({0.0}, {0.0}), ConfigError);
  CHECK_THROWS_AS(DomainSpec::ball({0.0, 0.0}, -1.0), ConfigError);
  CHECK_THROWS_AS(build_nested_regions(DomainSpec::cube(1, 0, 1), 0.0), ConfigError);
  // insets must leave a nonempty core
  CHECK_THROWS_AS(build_nested_regions(DomainSpec::cube(1, 0, 1), 0.2), ConfigError);
}

TEST_CASE("projection is idempotent and optimal") {
  for (auto dom : {DomainSpec::cube(3, -0.5, 1.2), DomainSpec::ball({0.3, -0.1, 0.0}, 0.9)}) {
    RngStream rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
      Vec x = random_point(rng, 3, -3.0, 3.0);
      Vec p = projected(dom, x);
      CHECK(contains(dom, p));
      Vec pp = projected(dom, p);
      CHECK(dist(p, pp) <= 1e-12);
      // no sampled interior point is closer to x than the projection
      Vec y = uniform_in_domain(dom, rng);
      CHECK(dist(x, p) <= dist(x, y) + 1e-12);
    }
  }
}

TEST_CASE("nested regions of the unit cube with margin 0.1") {
  auto regions = build_nested_regions(DomainSpec::cube(2, 0.0, 1.0), 0.1);
  CHECK(regions.K.lower[0] == doctest::Approx(0.3));
  CHECK(regions.K.upper[1] == doctest::Approx(0.7));
  CHECK(regions.O0.lower[0] == doctest::Approx(0.2));
  CHECK(regions.O0.upper[0] == doctest::Approx(0.8));
  CHECK(regions.O0_delta.lower[0] == doctest::Approx(0.15));
  CHECK(regions.O0_delta.upper[0] == doctest::Approx(0.85));

  Vec inside_k{0.5, 0.5}, edge_k{regions.K.lower[0], 0.5}, in_o0{0.25, 0.5},
      in_o0d{0.18, 0.5}, outer{0.05, 0.5};
  CHECK(regions.in_K(inside_k));
  CHECK(regions.in_K(edge_k));
  CHECK(regions.in_O0(in_o0));
  CHECK(!regions.in_K(in_o0));
  CHECK(regions.in_O0_delta(in_o0d));
  CHECK(!regions.in_O0(in_o0d));
  CHECK(!regions.in_O0_delta(outer));
  CHECK(contains(regions.domain, outer));
}

TEST_CASE("region inclusions hold with quantitative gaps") {
  for (auto dom : {DomainSpec::cube(2, 0.0, 1.0), DomainSpec::ball({0.5, 0.5}, 0.5)}) {
    auto regions = build_nested_regions(dom, 0.05);
    RngStream rng(17);
    int seen_k = 0;
    for (int i = 0; i < 5000; ++i) {
      Vec x = uniform_in_domain(dom, rng);
      if (regions.in_K(x)) {
        ++seen_k;
        CHECK(boundary_distance(regions.O0, x) >= regions.delta - 1e-9);
      }
      if (regions.in_O0(x)) CHECK(boundary_distance(regions.O0_delta, x) >= 0.5 * regions.delta - 1e-9);
      if (regions.in_O0_delta(x)) CHECK(boundary_distance(dom, x) >= 1.5 * regions.delta - 1e-9);
    }
    CHECK(seen_k > 100);
  }
}

TEST_CASE("inward normal on faces, corners, and sphere") {
  auto sq = DomainSpec::cube(2, 0.0, 1.0);
  Vec face{0.0, 0.5};
  auto n1 = inward_normal(sq, face);
  CHECK(n1[0] == doctest::Approx(1.0));
  CHECK(n1[1] == doctest::Approx(0.0));

  Vec corner{0.0, 0.0};
  auto n2 = inward_normal(sq, corner);
  CHECK(n2[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(n2[1] == doctest::Approx(1.0 / std::sqrt(2.0)));

  Vec top{1.0, 1.0};
  auto n3 = inward_normal(sq, top);
  CHECK(n3[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(n3[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));

  auto ball = DomainSpec::ball({0.0, 0.0}, 1.0);
  Vec bx{1.0, 0.0};
  auto n4 = inward_normal(ball, bx);
  CHECK(n4[0] == doctest::Approx(-1.0));
  CHECK(n4[1] == doctest::Approx(0.0));

  Vec interior{0.5, 0.5};
  CHECK_THROWS_AS(inward_normal(ball, interior), ConfigError);
}

TEST_CASE("uniform sampling fills the domain evenly") {
  auto dom = DomainSpec::ball({0.0, 0.0, 0.0}, 2.0);
  RngStream rng(31);
  const int n = 40000;
  double mean_rd = 0.0;  // (r/R)^d should be uniform on (0,1)
  Vec center_mean(3, 0.0);
  for (int i = 0; i < n; ++i) {
    Vec x = uniform_in_domain(dom, rng);
    REQUIRE(contains(dom, x));
    double r = dist(x, {0, 0, 0});
    mean_rd += std::pow(r / 2.0, 3);
    for (int k = 0; k < 3; ++k) center_mean[k] += x[k];
  }
  CHECK(std::abs(mean_rd / n - 0.5) < 0.01);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(center_mean[k] / n) < 0.03);
}

TEST_CASE("domain volumes") {
  CHECK(domain_volume(DomainSpec::cube(3, 0.0, 1.0)) == doctest::Approx(1.0));
  CHECK(domain_volume(DomainSpec::rectangle({0, 0}, {2, 3})) == doctest::Approx(6.0));
  CHECK(domain_volume(DomainSpec::ball({0, 0}, 1.0)) == doctest::Approx(std::numbers::pi));
  CHECK(domain_volume(DomainSpec::ball({0, 0, 0}, 1.0)) ==
        doctest::Approx(4.0 / 3.0 * std::numbers::pi));
}

TEST_CASE("cutoff is 1 on K, 0 outside the support region, smooth in between") {
  for (auto dom : {DomainSpec::cube(2, 0.0, 1.0), DomainSpec::ball({0.5, 0.5}, 0.5)}) {
    auto regions = build_nested_regions(dom, 0.06);
    CutoffField chi(regions);
    RngStream rng(530);
    for (int i = 0; i < 4000; ++i) {
      Vec x = uniform_in_domain(dom, rng);
      double v = chi.value(x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (regions.in_K(x)) CHECK(v == doctest::Approx(1.0));
      if (!regions.in_O0(x)) CHECK(v == doctest::Approx(0.0));
    }

    // finite-difference first and second derivatives stay below the stored bounds
    const double h = 1e-4;
    for (int i = 0; i < 2000; ++i) {
      Vec x = uniform_in_domain(regions.O0_delta, rng);
      for (int axis = 0; axis < 2; ++axis) {
        Vec xp = x, xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        double d1 = (chi.value(xp) - chi.value(xm)) / (2 * h);
        double d2 = (chi.value(xp) - 2 * chi.value(x) + chi.value(xm)) / (h * h);
        CHECK(std::abs(d1) <= chi.deriv_bound());
        CHECK(std::abs(d2) <= chi.second_deriv_bound());
      }
    }
  }
}

TEST_CASE("cutoff is Lipschitz along random segments") {
  auto regions = build_nested_regions(DomainSpec::cube(3, 0.0, 1.0), 0.08);
  CutoffField chi(regions);
  RngStream rng(12);
  // Euclidean Lipschitz constant is at most sqrt(d) times the per-axis bound
  double lip = std::sqrt(3.0) * chi.deriv_bound();
  for (int i = 0; i < 3000; ++i) {
    Vec a = uniform_in_domain(regions.domain, rng);
    Vec b = uniform_in_domain(regions.domain, rng);
    CHECK(std::abs(chi.value(a) - chi.value(b)) <= lip * dist(a, b) + 1e-12);
  }
}
