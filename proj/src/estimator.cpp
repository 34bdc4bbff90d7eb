#include "rdlab/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "rdlab/errors.hpp"

namespace rdlab {

ClippedField::ClippedField(FieldPtr inner, double hi) : inner_(std::move(inner)), hi_(hi) {
  if (!inner_) throw ConfigError("clipped field: inner field is required");
  if (!(hi_ > 0.0)) throw ConfigError("clipped field: upper bound must be positive");
}

double ClippedField::value(std::span<const double> x) const {
  return std::clamp(inner_->value(x), 0.0, hi_);
}

RegressionProblem build_regression(const ObservationSet& obs, BasisPtr basis,
                                   const NestedRegions& regions) {
  if (!basis) throw ConfigError("regression: basis is required");
  if (obs.dim() != basis->dim()) throw ConfigError("regression: dimension mismatch");
  const long long n = obs.n_increments();
  if (n < 1) throw ConfigError("regression: need at least one increment");
  const int K = static_cast<int>(basis->size());

  RegressionProblem prob;
  prob.basis = basis;
  prob.n_rows = n;
  prob.has_dense = n * K <= kDenseCellLimit;
  if (prob.has_dense) {
    prob.design = Eigen::MatrixXd::Zero(n, K);
    prob.responses = Eigen::VectorXd::Zero(n);
  }
  prob.xtx = Eigen::MatrixXd::Zero(K, K);
  prob.xty = Eigen::VectorXd::Zero(K);

  auto y = increments_Y(obs);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (long long i = 0; i < n; ++i) {
    const Vec& x_prev = obs.points[static_cast<std::size_t>(i)];
    if (!regions.in_O0_delta(x_prev)) continue;  // row stays identically zero
    ++prob.active_rows;
    const double resp = y[static_cast<std::size_t>(i)] - 1.0;
    row.clear();
    sparse_row(*basis, x_prev, row);
    for (const auto& [a, va] : row) {
      prob.xty(a) += va * resp;
      for (const auto& [b, vb] : row)
        if (b >= a) prob.xtx(a, b) += va * vb;
    }
    prob.yty += resp * resp;
    if (prob.has_dense) {
      for (const auto& [a, va] : row) prob.design(i, a) = va;
      prob.responses(i) = resp;
    }
  }
  prob.xtx.triangularView<Eigen::StrictlyLower>() =
      prob.xtx.triangularView<Eigen::StrictlyUpper>().transpose();

  if (prob.active_rows == 0)
    throw NumericError("regression: no observed state falls in the filtering region");
  return prob;
}

CoeffVector solve_lsq(const RegressionProblem& prob, SolverReport* report) {
  const int K = prob.K();
  SolverReport rep;
  Eigen::VectorXd c;
  if (prob.has_dense) {
    rep.dense_path = true;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(prob.design,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    c = svd.solve(prob.responses);
    rep.rank = static_cast<int>(svd.rank());
    rep.residual_norm = (prob.design * c - prob.responses).norm();
  } else {
    // Normal equations: eigenvalues of X^T X are squared singular values, so
    // the same relative cut applies squared.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prob.xtx);
    const auto& lam = eig.eigenvalues();
    double lam_max = lam(K - 1);
    double cut = lam_max * 1e-20;
    c = Eigen::VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) {
      if (lam(k) <= cut || lam(k) <= 0.0) continue;
      ++rep.rank;
      double proj = eig.eigenvectors().col(k).dot(prob.xty);
      c += eig.eigenvectors().col(k) * (proj / lam(k));
    }
    double rss = prob.yty - 2.0 * c.dot(prob.xty) + c.dot(prob.xtx * c);
    rep.residual_norm = std::sqrt(std::max(0.0, rss));
  }
  if (report) *report = rep;
  return CoeffVector(c.data(), c.data() + K);
}

EstimatorOutput estimate_f(const ObservationSet& obs, BasisPtr basis,
                           const NestedRegions& regions, double M) {
  if (!(M > 0.0)) throw ConfigError("estimate: truncation level must be positive");
  auto prob = build_regression(obs, basis, regions);
  EstimatorOutput out;
  out.coeffs = solve_lsq(prob, &out.report);
  out.f_hat = std::make_shared<WaveletSumField>(basis, out.coeffs, 1.0);
  out.f_hat_star = std::make_shared<ClippedField>(out.f_hat, M);
  return out;
}

double empirical_norm(const ObservationSet& obs, const ScalarField& g,
                      const NestedRegions& regions) {
  const long long n = obs.n_increments();
  if (n < 1) throw ConfigError("empirical norm: need at least one increment");
  double s = 0.0;
  for (long long i = 0; i < n; ++i) {
    const Vec& x = obs.points[static_cast<std::size_t>(i)];
    if (!regions.in_O0_delta(x)) continue;
    double v = g.value(x);
    s += v * v;
  }
  return std::sqrt(s / static_cast<double>(n));
}

namespace {

BnReport gram_eigen_range(const Eigen::MatrixXd& xtx, long long n, double volume,
                          double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw ConfigError("event check: kappa must lie in (0,1)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx);
  const auto& lam = eig.eigenvalues();
  double scale = volume / static_cast<double>(n);
  BnReport rep;
  rep.eig_lo = lam(0) * scale;
  rep.eig_hi = lam(lam.size() - 1) * scale;
  rep.ok = rep.eig_lo >= 1.0 - kappa && rep.eig_hi <= 1.0 + kappa;
  return rep;
}

}  // namespace

BnReport check_BN(const ObservationSet& obs, BasisPtr basis, const NestedRegions& regions,
                  double kappa) {
  if (!basis) throw ConfigError("event check: basis is required");
  if (obs.dim() != basis->dim()) throw ConfigError("event check: dimension mismatch");
  const long long n = obs.n_increments();
  if (n < 1) throw ConfigError("event check: need at least one increment");
  const int K = static_cast<int>(basis->size());
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(K, K);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (long long i = 0; i < n; ++i) {
    const Vec& x = obs.points[static_cast<std::size_t>(i)];
    if (!regions.in_O0_delta(x)) continue;
    row.clear();
    sparse_row(*basis, x, row);
    for (const auto& [a, va] : row)
      for (const auto& [b, vb] : row)
        if (b >= a) xtx(a, b) += va * vb;
  }
  xtx.triangularView<Eigen::StrictlyLower>() =
      xtx.triangularView<Eigen::StrictlyUpper>().transpose();
  return gram_eigen_range(xtx, n, domain_volume(regions.domain), kappa);
}

BnReport check_BN(const RegressionProblem& prob, double kappa) {
  if (!prob.basis) throw ConfigError("event check: problem has no basis");
  return gram_eigen_range(prob.xtx, prob.n_rows,
                          domain_volume(prob.basis->regions.domain), kappa);
}

double l2_error(const ScalarField& a, const ScalarField& b, const DomainSpec& dom,
                int n_per_axis) {
  if (n_per_axis < 1) throw ConfigError("l2 distance: grid must be positive");
  if (a.dim() != dom.dim || b.dim() != dom.dim)
    throw ConfigError("l2 distance: dimension mismatch");
  const int d = dom.dim;
  Vec lo(d), hi(d);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    lo = dom.lower;
    hi = dom.upper;
  } else {
    for (int j = 0; j < d; ++j) {
      lo[j] = dom.center[j] - dom.radius;
      hi[j] = dom.center[j] + dom.radius;
    }
  }
  double cell = 1.0;
  for (int j = 0; j < d; ++j) cell *= (hi[j] - lo[j]) / n_per_axis;

  std::vector<int> idx(d, 0);
  Vec x(d);
  double acc = 0.0;
  for (;;) {
    for (int j = 0; j < d; ++j)
      x[j] = lo[j] + (hi[j] - lo[j]) * (idx[j] + 0.5) / n_per_axis;
    if (dom.kind == DomainSpec::Kind::rectangle || contains(dom, x)) {
      double diff = a.value(x) - b.value(x);
      acc += diff * diff;
    }
    int j = 0;
    while (j < d && ++idx[j] == n_per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  return std::sqrt(acc * cell);
}

bool plug_in_test(const ScalarField& f_hat, const ScalarField& f0, double m_tilde,
                  double xi, const DomainSpec& dom, int n_per_axis) {
  if (!(m_tilde > 0.0) || !(xi > 0.0))
    throw ConfigError("test: threshold factors must be positive");
  return l2_error(f_hat, f0, dom, n_per_axis) >= m_tilde * xi;
}

int select_level(const ObservationSet& obs, FamilyPtr family, const NestedRegions& regions,
                 int J0, int J_max, double c) {
  if (J_max < J0) throw ConfigError("level selection: J_max must be at least J0");
  if (c < 0.0) {
    auto y = increments_Y(obs);
    double m = 0.0, m2 = 0.0;
    for (double v : y) {
      m += v;
      m2 += v * v;
    }
    m /= static_cast<double>(y.size());
    c = 2.0 * std::max(1e-12, m2 / static_cast<double>(y.size()) - m * m);
  }
  int best_j = J0;
  double best = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(obs.n_increments());
  for (int J = J0; J <= J_max; ++J) {
    auto basis = build_basis(family, regions, J0, J);
    auto prob = build_regression(obs, basis, regions);
    SolverReport rep;
    solve_lsq(prob, &rep);
    double crit = rep.residual_norm * rep.residual_norm / n +
                  c * static_cast<double>(basis->size()) / n;
    if (crit < best) {
      best = crit;
      best_j = J;
    }
  }
  return best_j;
}

}  // namespace rdlab
