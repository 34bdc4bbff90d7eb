#pragma once
#include <memory>
#include <span>
#include <vector>

#include "rdlab/geometry.hpp"

namespace rdlab {

// Real-valued field on R^d. Derivatives default to central finite differences
// so concrete fields only need value(); analytic families may override.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;

  double operator()(std::span<const double> x) const { return value(x); }

  // d/dx_axis, filled into g for all axes.
  virtual void gradient(std::span<const double> x, std::span<double> g) const;

  // Pure k-th partial along one axis, k = 1..4 (finite differences).
  virtual double partial(std::span<const double> x, int axis, int order) const;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

class ConstantField final : public ScalarField {
 public:
  ConstantField(int d, double c) : dim_(d), c_(c) {}
  int dim() const override { return dim_; }
  double value(std::span<const double>) const override { return c_; }
  void gradient(std::span<const double>, std::span<double> g) const override {
    for (double& v : g) v = 0.0;
  }

 private:
  int dim_;
  double c_;
};

// base + amp * chi(x) * prod_i cos(2 pi freq (x_i - c_i)). With the cutoff
// factor the field equals `base` outside the cutoff's support region, so it
// stays inside the model class whenever base = 1.
class CosBumpField final : public ScalarField {
 public:
  CosBumpField(NestedRegions regions, double base, double amp, double freq, Vec center);
  int dim() const override { return cutoff_.regions().domain.dim; }
  double value(std::span<const double> x) const override;

 private:
  CutoffField cutoff_;
  double base_, amp_, freq_;
  Vec center_;
};

// Values on a regular lattice over a rectangle, multilinear interpolation,
// clamped outside the lattice box.
class GridField final : public ScalarField {
 public:
  GridField(Vec lo, Vec hi, std::vector<int> n_per_axis, std::vector<double> values);
  int dim() const override { return static_cast<int>(lo_.size()); }
  double value(std::span<const double> x) const override;

  static GridField sample(const ScalarField& f, Vec lo, Vec hi, std::vector<int> n_per_axis);

 private:
  Vec lo_, hi_;
  std::vector<int> n_;
  std::vector<double> v_;
};

}  // namespace rdlab
