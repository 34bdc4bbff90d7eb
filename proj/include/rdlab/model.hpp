#pragma once
#include <cstdint>
#include <string>

#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/wavelet.hpp"

namespace rdlab {

// Minimal Holder regularity the transition-density machinery needs in
// dimension d: max(4, 2*floor(d/4 + 1/2)).
int alpha_d(int d);

// Smoothness threshold for the contraction theory at sampling exponent a,
// as the three-term maximum and in its equivalent piecewise form.
double s_star(int d, double a);
double s_star_piecewise(int d, double a);

struct RateParams {
  int d = 1;
  double a = 0.6;   // sampling interval D = N^-a, a in (1/2, 1)
  double s = 2.0;   // smoothness
  double N = 1e4;   // sample count (real-valued so sweeps can be dense)
};

struct SequenceBundle {
  double D = 0;
  double eps = 0, eps1 = 0, eps2 = 0, eps3 = 0;  // N^-(s-k)/(2s+d), k = 0..3
  double xi = 0;                                 // slack sequence, set to eps
  double E = 0, V = 0;
};

SequenceBundle rate_sequences(const RateParams& rp);

struct RemarkReport {
  double threshold = 0;
  bool ok = false;
  std::string detail;
};

// Sufficient smoothness threshold under the usual nonparametric sequence
// choices; s must exceed it for E and V to behave.
RemarkReport check_remark_conditions(int d, double a, double s);

// Link between the unconstrained w-field and a diffusivity:
// phi(x) = f_min + (1 - f_min) e^x, strictly increasing with phi(0) = 1.
double link_phi(double x, double f_min);
double link_phi_inverse(double y, double f_min);

// f(x) = phi(chi(x) w(x)): equals 1 wherever the cutoff vanishes, equals
// phi(w) on the core K, and stays above f_min everywhere.
class LinkedField final : public ScalarField {
 public:
  LinkedField(FieldPtr w, CutoffField chi, double f_min);
  int dim() const override { return w_->dim(); }
  double value(std::span<const double> x) const override;
  double f_min() const { return f_min_; }

 private:
  FieldPtr w_;
  CutoffField chi_;
  double f_min_;
};

FieldPtr compose_field(FieldPtr w, const CutoffField& chi, double f_min);

// Strict class membership for truths: f = 1 outside O_0 within tol, checked
// on a lattice over the domain.
bool is_in_model_class(const ScalarField& f, const NestedRegions& regions, double tol = 1e-8);

// Sign-indexed perturbation family for the two-point / hypercube lower-bound
// experiments: f_eps = 1 + gamma * sum_ell eps_ell psi_{J,ell} with pairwise
// disjoint supports inside a cube well inside K.
struct AssouadFamily {
  FamilyPtr family;
  int d = 0;
  int J = 0;                // perturbation level
  double gamma = 0;
  Vec cube_lo, cube_hi;
  int per_axis = 0;         // bumps per axis; total count = per_axis^d
  std::vector<int> r0;      // first translation per axis
  int spacing = 0;          // translation step between adjacent bumps
  double sup_amplitude = 0; // gamma * 2^(Jd/2) * ||psi||_inf^d

  std::size_t size() const;
  // Per-axis translation indices of bump ell.
  std::vector<int> bump_r(std::size_t ell) const;
  double bump_value(std::size_t ell, std::span<const double> x) const;
  FieldPtr member(std::span<const int> signs) const;  // signs in {-1, +1}
};

AssouadFamily build_assouad_family(const NestedRegions& regions, FamilyPtr family, double s,
                                   double N, const DomainSpec& cube, double gamma_scale,
                                   double J_scale, double f_min, double holder_budget);

}  // namespace rdlab
