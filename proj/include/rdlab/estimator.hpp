#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "rdlab/diffusion.hpp"
#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/wavelet.hpp"

namespace rdlab {

// Least-squares regression of the normalized squared displacements onto the
// projection space, with rows filtered to starts inside the enlarged support
// region. The dense design is only materialized while n_rows * K stays small;
// the accumulated normal equations are always available.
struct RegressionProblem {
  BasisPtr basis;
  long long n_rows = 0;
  long long active_rows = 0;
  bool has_dense = false;
  Eigen::MatrixXd design;     // n_rows x K when dense, empty otherwise
  Eigen::VectorXd responses;  // (Y_i - 1) * indicator, n_rows when dense
  Eigen::MatrixXd xtx;        // K x K
  Eigen::VectorXd xty;
  double yty = 0.0;

  int K() const { return static_cast<int>(xtx.rows()); }
};

// Above this many design cells the solver switches to the normal equations.
inline constexpr long long kDenseCellLimit = 2'000'000;

struct SolverReport {
  int rank = 0;
  double residual_norm = 0.0;
  bool dense_path = false;
};

struct EstimatorOutput {
  CoeffVector coeffs;
  FieldPtr f_hat;       // 1 + fitted series
  FieldPtr f_hat_star;  // clipped to [0, M]
  SolverReport report;
};

// min(f, hi) then the positive part; the standard truncation of an estimate.
class ClippedField final : public ScalarField {
 public:
  ClippedField(FieldPtr inner, double hi);
  int dim() const override { return inner_->dim(); }
  double value(std::span<const double> x) const override;

 private:
  FieldPtr inner_;
  double hi_;
};

RegressionProblem build_regression(const ObservationSet& obs, BasisPtr basis,
                                   const NestedRegions& regions);

// Minimal-Euclidean-norm least-squares solution; singular directions below
// 1e-10 of the top singular value are cut.
CoeffVector solve_lsq(const RegressionProblem& prob, SolverReport* report = nullptr);

EstimatorOutput estimate_f(const ObservationSet& obs, BasisPtr basis,
                           const NestedRegions& regions, double M);

// sqrt of the empirical mean of g(X_{(i-1)D})^2 over filtered rows.
double empirical_norm(const ObservationSet& obs, const ScalarField& g,
                      const NestedRegions& regions);

// Two-sided comparison of the empirical semi-norm with the exact L2 norm over
// the whole projection space: eigenvalues of the volume-scaled empirical Gram
// must lie in [1-kappa, 1+kappa].
struct BnReport {
  bool ok = false;
  double eig_lo = 0.0;
  double eig_hi = 0.0;
  double worst() const { return std::max(1.0 - eig_lo, eig_hi - 1.0); }
};

BnReport check_BN(const ObservationSet& obs, BasisPtr basis, const NestedRegions& regions,
                  double kappa);
BnReport check_BN(const RegressionProblem& prob, double kappa);

// L2(O) distance by composite midpoint quadrature with n points per axis.
double l2_error(const ScalarField& a, const ScalarField& b, const DomainSpec& dom,
                int n_per_axis);

// Rejection indicator of the goodness-of-fit test: distance at or above the
// threshold rejects (closed rejection region).
bool plug_in_test(const ScalarField& f_hat, const ScalarField& f0, double m_tilde,
                  double xi, const DomainSpec& dom, int n_per_axis);

// Convenience extension, not used by the theory-facing paths: pick the level
// J in [J0, J_max] minimizing RSS/N + c * dim(V_J)/N. c < 0 means the default
// 2 * Var(Y).
int select_level(const ObservationSet& obs, FamilyPtr family, const NestedRegions& regions,
                 int J0, int J_max, double c = -1.0);

}  // namespace rdlab
