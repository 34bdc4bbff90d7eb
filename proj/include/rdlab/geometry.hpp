#pragma once
#include <span>
#include <vector>

#include "rdlab/rng.hpp"

namespace rdlab {

using Vec = std::vector<double>;

// Convex domain the diffusion lives in: an axis-aligned box or a Euclidean
// ball. Everything downstream (regions, cutoff, simulator) works for either.
struct DomainSpec {
  enum class Kind { rectangle, ball };

  Kind kind = Kind::rectangle;
  int dim = 0;
  Vec lower, upper;     // rectangle bounds, size dim
  Vec center;           // ball center, size dim
  double radius = 0.0;  // ball radius

  static DomainSpec rectangle(Vec lo, Vec hi);
  static DomainSpec cube(int d, double lo, double hi);
  static DomainSpec ball(Vec c, double r);
};

bool contains(const DomainSpec& dom, std::span<const double> x);

// Distance to the boundary, positive inside. Outside a rectangle this decays
// to minus the largest per-axis violation, which is all callers need there.
double boundary_distance(const DomainSpec& dom, std::span<const double> x);

// Euclidean projection onto the (closed) domain, in place.
void project_to_domain(const DomainSpec& dom, std::span<double> x);
Vec projected(const DomainSpec& dom, std::span<const double> x);

bool on_boundary(const DomainSpec& dom, std::span<const double> x, double tol);

// Unit inward normal at a boundary point. On a rectangle edge or corner (more
// than one face active within tol) this is the normalized sum of the active
// face normals.
Vec inward_normal(const DomainSpec& dom, std::span<const double> x, double tol = 1e-9);

Vec uniform_in_domain(const DomainSpec& dom, RngStream& rng);
double domain_volume(const DomainSpec& dom);

// Nested interior regions K ⊂ O_0 ⊂ O_0^δ ⊂ O obtained by insetting the
// domain boundary by 3δ, 2δ and 1.5δ respectively. K is where the cutoff is
// identically one, O_0 carries the perturbation support, and O_0^δ is the
// slightly enlarged region data points are filtered against.
struct NestedRegions {
  DomainSpec domain;
  double delta = 0.0;
  DomainSpec K, O0, O0_delta;

  bool in_K(std::span<const double> x) const;        // closed
  bool in_O0(std::span<const double> x) const;       // open
  bool in_O0_delta(std::span<const double> x) const; // open
};

NestedRegions build_nested_regions(const DomainSpec& dom, double delta);

// Smooth cutoff χ with χ = 1 on K and χ = 0 outside O_0. Built from a C^3
// polynomial step over each transition band of width δ: per-axis product for
// rectangles, radial profile for balls. The stored bounds dominate every
// first / second partial derivative and are what the smoothness tests check
// finite differences against.
class CutoffField {
 public:
  CutoffField() = default;
  explicit CutoffField(const NestedRegions& regions);

  double value(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return value(x); }

  double deriv_bound() const { return deriv_bound_; }
  double second_deriv_bound() const { return second_deriv_bound_; }
  const NestedRegions& regions() const { return regions_; }

 private:
  NestedRegions regions_;
  double deriv_bound_ = 0.0;
  double second_deriv_bound_ = 0.0;
};

namespace detail {
// C^3 step: 0 for t<=0, 1 for t>=1, derivative 140 t^3 (1-t)^3 in between.
inline double smoothstep7(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}
}  // namespace detail

}  // namespace rdlab
