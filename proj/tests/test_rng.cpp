#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rdlab/rng.hpp"

using rdlab::RngStream;

TEST_CASE("same key reproduces the same sequence") {
  RngStream a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays strictly inside (0,1) with the right moments") {
  RngStream r(7);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.004);        // ~5 sigma of the mean estimator
  CHECK(std::abs(var - 1.0 / 12.0) < 0.004);
}

TEST_CASE("normal draws match N(0,1) moments including kurtosis") {
  RngStream r(99);
  const int n = 400000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);
  CHECK(std::abs(s4 / n - 3.0) < 0.12);
}

TEST_CASE("substreams with different lanes are uncorrelated") {
  auto a = RngStream::substream(42, 0, 3);
  auto b = RngStream::substream(42, 1, 3);
  const int n = 50000;
  double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    double x = a.normal(), y = b.normal();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  double cov = sab / n - (sa / n) * (sb / n);
  double corr = cov / std::sqrt((saa / n - sa / n * sa / n) * (sbb / n - sb / n * sb / n));
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("substream lane order matters") {
  auto a = RngStream::substream(42, 1, 2);
  auto b = RngStream::substream(42, 2, 1);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform_index respects its bound and covers all cells") {
  RngStream r(5);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 20000; ++i) {
    auto k = r.uniform_index(10);
    REQUIRE(k < 10);
    ++hits[static_cast<int>(k)];
  }
  for (int h : hits) CHECK(h > 1600);  // expectation 2000, ~9 sigma slack
}
