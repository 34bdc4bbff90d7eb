#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rdlab/errors.hpp"
#include "rdlab/model.hpp"
#include "rdlab/rng.hpp"

using namespace rdlab;

TEST_CASE("minimal regularity by dimension") {
  CHECK(alpha_d(1) == 4);
  CHECK(alpha_d(2) == 4);
  CHECK(alpha_d(3) == 4);
  CHECK(alpha_d(8) == 4);
  CHECK(alpha_d(12) == 6);
  CHECK(alpha_d(20) == 10);
  CHECK_THROWS_AS(alpha_d(0), ConfigError);
}

TEST_CASE("smoothness threshold: worked values and the piecewise rewrite") {
  CHECK(s_star(1, 0.6) == doctest::Approx(7.0));
  CHECK(s_star(4, 0.6) == doctest::Approx(8.0));
  CHECK(s_star_piecewise(4, 0.6) == doctest::Approx(8.0));
  // diverges as a -> 1
  CHECK(s_star(4, 0.99) > s_star(4, 0.9));
  CHECK(s_star(4, 0.999) > 1000.0);
  CHECK_THROWS_AS(s_star(1, 0.5), ConfigError);
  CHECK_THROWS_AS(s_star(1, 1.0), ConfigError);

  // piecewise form agrees with the three-term max everywhere
  RngStream rng(2718);
  for (int t = 0; t < 10000; ++t) {
    int d = 1 + static_cast<int>(rng.uniform_index(8));
    double a = rng.uniform(0.5001, 0.9999);
    REQUIRE(s_star(d, a) == doctest::Approx(s_star_piecewise(d, a)).epsilon(1e-12));
  }
}

TEST_CASE("sequence bundle: values, ordering, and asymptotic behavior") {
  RateParams rp{1, 0.6, 2.0, 1e4};
  auto b = rate_sequences(rp);
  CHECK(b.eps == doctest::Approx(std::pow(10.0, -1.6)).epsilon(1e-12));
  CHECK(b.eps == doctest::Approx(0.0251).epsilon(1e-3));
  CHECK(b.D == doctest::Approx(std::pow(1e4, -0.6)));

  RngStream rng(5);
  for (int t = 0; t < 300; ++t) {
    RateParams q{1 + static_cast<int>(rng.uniform_index(4)), rng.uniform(0.51, 0.99),
                 rng.uniform(3.2, 9.0), std::pow(10.0, rng.uniform(1.0, 8.0))};
    auto bb = rate_sequences(q);
    REQUIRE(bb.eps <= bb.eps1);
    REQUIRE(bb.eps1 <= bb.eps2);
    REQUIRE(bb.eps2 <= bb.eps3);
  }

  // with s above the threshold, E/eps^2 stays bounded and V/(N^2 eps^4) -> 0.
  // The slowest component decays like N^{-0.024} here, so the limit is only
  // visible at enormous N; the formulas are closed-form, so evaluate them there.
  double prev_ratio_v = 1e300;
  for (int k = 5; k <= 100; k += 5) {
    RateParams q{1, 0.6, 8.0, std::pow(10.0, k)};
    auto bb = rate_sequences(q);
    CHECK(bb.E / (bb.eps * bb.eps) < 3.0);
    double rv = bb.V / (q.N * q.N * std::pow(bb.eps, 4));
    CHECK(rv < prev_ratio_v);
    prev_ratio_v = rv;
  }
  CHECK(prev_ratio_v < 0.01);
}

TEST_CASE("sufficient-condition report matches the case table") {
  auto r1 = check_remark_conditions(1, 0.6, 8.0);
  CHECK(r1.threshold == doctest::Approx(7.0));
  CHECK(r1.ok);
  CHECK(!check_remark_conditions(1, 0.6, 6.5).ok);

  // d = 4: any positive smoothness passes
  auto r4 = check_remark_conditions(4, 0.77, 0.5);
  CHECK(r4.threshold == doctest::Approx(0.0));
  CHECK(r4.ok);

  auto r3 = check_remark_conditions(3, 0.7, 0.5);
  CHECK(r3.threshold == doctest::Approx(0.0));
  CHECK(r3.ok);

  // continuity of the case split at d=3, a=2/3: both branches give 0
  auto rb = check_remark_conditions(3, 2.0 / 3.0, 0.1);
  CHECK(rb.threshold == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("link function: fixed points, worked value, monotonicity, inverse") {
  CHECK(link_phi(0.0, 0.25) == doctest::Approx(1.0));
  CHECK(link_phi(1.0, 0.25) == doctest::Approx(0.25 + 0.75 * std::exp(1.0)).epsilon(1e-12));
  CHECK(link_phi(1.0, 0.25) == doctest::Approx(2.2887).epsilon(1e-4));

  RngStream rng(8);
  double prev = link_phi(-5.0, 0.25);
  for (double x = -4.9; x <= 5.0; x += 0.1) {
    double v = link_phi(x, 0.25);
    REQUIRE(v > prev);
    prev = v;
  }
  for (int t = 0; t < 500; ++t) {
    double x = rng.uniform(-5.0, 5.0);
    REQUIRE(link_phi_inverse(link_phi(x, 0.25), 0.25) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK_THROWS_AS(link_phi_inverse(0.2, 0.25), ConfigError);
}

TEST_CASE("composed fields are 1 off the support region and bounded below") {
  auto regions = build_nested_regions(DomainSpec::cube(2, 0.0, 1.0), 0.1);
  CutoffField chi(regions);

  auto zero = std::make_shared<ConstantField>(2, 0.0);
  auto f0 = compose_field(zero, chi, 0.25);
  RngStream rng(11);
  for (int t = 0; t < 500; ++t) {
    Vec x = uniform_in_domain(regions.domain, rng);
    REQUIRE(f0->value(x) == doctest::Approx(1.0));
  }

  auto w = std::make_shared<ConstantField>(2, -3.0);
  auto f = compose_field(w, chi, 0.25);
  for (int t = 0; t < 2000; ++t) {
    Vec x = uniform_in_domain(regions.domain, rng);
    double v = f->value(x);
    REQUIRE(v >= 0.25);
    if (regions.in_K(x)) REQUIRE(v == doctest::Approx(link_phi(-3.0, 0.25)));
    if (!regions.in_O0(x)) REQUIRE(v == doctest::Approx(1.0));
  }
  CHECK(is_in_model_class(*f, regions));
  ConstantField bad(2, 1.1);
  CHECK(!is_in_model_class(bad, regions));
}

TEST_CASE("perturbation family: geometry, distances, and membership guards") {
  auto regions = build_nested_regions(DomainSpec::cube(1, 0.0, 1.0), 0.1);
  auto fam = build_family(2);
  auto cube = DomainSpec::rectangle({0.35}, {0.65});
  const double N = 1e8, s = 2.0;  // level 5: two disjoint bumps fit in the carrier
  auto af = build_assouad_family(regions, fam, s, N, cube, 0.5, 1.0, 0.25, 1e9);

  CHECK(af.gamma == doctest::Approx(0.5 / std::sqrt(N)));
  CHECK(af.size() >= 1);
  CHECK(1.0 - af.sup_amplitude >= 0.5);

  // supports sit inside the cube and are pairwise disjoint
  const int sup = 2 * fam->p - 1;
  for (std::size_t e = 0; e < af.size(); ++e) {
    auto r = af.bump_r(e);
    double lo = std::ldexp(static_cast<double>(r[0]), -af.J);
    double hi = std::ldexp(static_cast<double>(r[0] + sup), -af.J);
    REQUIRE(lo >= 0.35 - 1e-12);
    REQUIRE(hi <= 0.65 + 1e-12);
  }
  for (std::size_t e = 0; e + 1 < af.size(); ++e) {
    auto ra = af.bump_r(e), rb = af.bump_r(e + 1);
    REQUIRE(rb[0] - ra[0] >= sup + 1);  // a whole empty cell in between
  }

  // flipping one sign changes f exactly on that bump's support with mass 4 gamma^2
  std::vector<int> plus(af.size(), 1), flip(af.size(), 1);
  flip[0] = -1;
  auto fp = af.member(plus);
  auto ff = af.member(flip);
  const int n = 1 << 15;
  double l2 = 0.0, l2all = 0.0;
  std::vector<int> minus(af.size(), -1);
  auto fm = af.member(minus);
  for (int i = 0; i < n; ++i) {
    Vec x{(i + 0.5) / n};
    double dv = fp->value(x) - ff->value(x);
    l2 += dv * dv;
    double dall = fp->value(x) - fm->value(x);
    l2all += dall * dall;
  }
  l2 /= n;
  l2all /= n;
  CHECK(l2 == doctest::Approx(4.0 * af.gamma * af.gamma).epsilon(5e-3));
  CHECK(l2all ==
        doctest::Approx(4.0 * af.gamma * af.gamma * static_cast<double>(af.size())).epsilon(5e-3));

  // members are legitimate diffusivities
  CHECK(is_in_model_class(*fp, regions));

  // guards fire when the scales are too aggressive
  CHECK_THROWS_WITH_AS(
      build_assouad_family(regions, fam, s, N, cube, 1e4, 1.0, 0.25, 1e9),
      doctest::Contains("inf f"), ConfigError);
  CHECK_THROWS_WITH_AS(
      build_assouad_family(regions, fam, s, N, cube, 0.5, 1.0, 0.25, 1e-6),
      doctest::Contains("proxy"), ConfigError);
  auto outside = DomainSpec::rectangle({0.05}, {0.3});
  CHECK_THROWS_WITH_AS(build_assouad_family(regions, fam, s, N, outside, 0.5, 1.0, 0.25, 1e9),
                       doctest::Contains("inside K"), ConfigError);
}
