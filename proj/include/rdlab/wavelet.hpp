#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"

namespace rdlab {

// Compactly supported Daubechies pair (phi, psi) of order p, both supported
// on [0, 2p-1], tabulated on a dyadic grid by the cascade refinement and
// evaluated by linear interpolation between table points.
struct WaveletFamily {
  int p = 0;
  int table_depth = 12;
  std::vector<double> h;    // low-pass filter, length 2p, sums to sqrt(2)
  std::vector<double> phi;  // tables on [0, 2p-1], step 2^-table_depth
  std::vector<double> psi;

  double support_len() const { return 2.0 * p - 1.0; }
  double eval_phi(double x) const { return eval(phi, x); }
  double eval_psi(double x) const { return eval(psi, x); }

  // Exact (filter-recursion) moments: \int x^k phi and \int x^k psi.
  double phi_moment(int k) const;
  double psi_moment(int k) const;

 private:
  double eval(const std::vector<double>& table, double x) const;
};

using FamilyPtr = std::shared_ptr<const WaveletFamily>;

// build_family(p): embedded published filter + cascade tables. p in 2..10.
FamilyPtr build_family(int p, int table_depth = 12);

// One tensor basis element: level l, per-axis translations r, and the
// scaling/wavelet pattern (bit i set = wavelet factor on axis i). kind == 0
// (pure scaling) appears only at the base level.
struct TensorIndex {
  int level = 0;
  unsigned kind = 0;
  std::vector<int> r;
};

std::string kind_string(unsigned kind, int d);  // e.g. "sw" in d=2
unsigned kind_from_string(const std::string& s);

// The projection space V_J over the nested regions: scaling functions at J0
// plus all 2^d - 1 wavelet patterns at levels J0..J, keeping every index
// whose support meets O_0. Construction fails if J0 is too small for the
// supports to stay inside the enlargement O_0^delta.
struct BasisSpec {
  FamilyPtr family;
  NestedRegions regions;
  int J0 = 0, J = 0;
  std::vector<TensorIndex> indices;
  std::vector<std::size_t> count_per_level;  // indices at J0, J0+1, ..., J
  std::unordered_map<std::uint64_t, std::uint32_t> lookup;  // packed index -> position

  std::size_t size() const { return indices.size(); }
  int dim() const { return regions.domain.dim; }
};

using BasisPtr = std::shared_ptr<const BasisSpec>;

int minimal_feasible_J0(const WaveletFamily& family, const NestedRegions& regions);
BasisPtr build_basis(FamilyPtr family, const NestedRegions& regions, int J0, int J);

// Support rectangle of an index, per axis [lo_i, hi_i].
void support_box(const BasisSpec& basis, const TensorIndex& idx, std::span<double> lo,
                 std::span<double> hi);

double evaluate(const BasisSpec& basis, const TensorIndex& idx, std::span<const double> x);

// All basis elements that are nonzero at x: appends (position-in-basis,
// value) pairs. The count is O((2p-1)^d) per level/kind, independent of the
// total basis size, which is what makes the regression and likelihood loops
// at large N affordable.
void sparse_row(const BasisSpec& basis, std::span<const double> x,
                std::vector<std::pair<std::uint32_t, double>>& out);

using CoeffVector = std::vector<double>;

// Coefficients <g, psi_idx> by composite midpoint quadrature at per-axis
// resolution 2^(J+4) over each index's support box.
CoeffVector project(const BasisSpec& basis,
                    const std::function<double(std::span<const double>)>& g);

double synthesize_at(const BasisSpec& basis, const CoeffVector& c, std::span<const double> x);

// Quadrature inner product of two basis elements (midpoint, step 2^-(J+4)).
double quad_inner(const BasisSpec& basis, const TensorIndex& a, const TensorIndex& b);

// sup_l 2^{l(s+d/2)} max_r |c_lr|: Besov-type proxy for C^s-norm surrogates.
double besov_coeff_norm(const BasisSpec& basis, const CoeffVector& c, double s);

// Field base + sum_i c_i psi_i, evaluated through sparse rows.
class WaveletSumField final : public ScalarField {
 public:
  WaveletSumField(BasisPtr basis, CoeffVector c, double base = 1.0);
  int dim() const override { return basis_->dim(); }
  double value(std::span<const double> x) const override;
  const CoeffVector& coeffs() const { return c_; }
  const BasisSpec& basis() const { return *basis_; }

 private:
  BasisPtr basis_;
  CoeffVector c_;
  double base_;
};

// 1 + P_J[f - 1] for fields equal to 1 off O_0 (checked on a lattice, 1e-8).
std::shared_ptr<WaveletSumField> bar_project(BasisPtr basis, const ScalarField& f);

}  // namespace rdlab
