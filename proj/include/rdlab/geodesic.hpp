#pragma once

#include <span>

#include "rdlab/field.hpp"

namespace rdlab {

// Controls for the discrete geodesic solver. The path is a polyline with
// path_points segments; interior knots are moved by gradient descent with
// backtracking until the energy stops improving by more than tol (relative).
struct GeodesicSolverSpec {
  int path_points = 64;
  int max_iters = 20000;
  double step = 0.05;
  double tol = 1e-10;
};

// Riemannian distance for the metric f^{-1} dx^2: the infimum over paths of
// int |gamma'| / sqrt(f). Computed by minimizing the discrete path energy
//   sum_j |g_{j+1} - g_j|^2 / (h f(m_j)),   m_j = midpoint, h = 1/path_points,
// whose minimum equals the squared distance (the minimizer has constant
// speed). Throws NumericError when the descent fails to settle.
double geodesic_distance(const ScalarField& f, std::span<const double> x,
                         std::span<const double> y, const GeodesicSolverSpec& spec = {});

// Two-term short-range expansion of the squared distance around x:
//   |y-x|^2 / f(x) + (1/2) |y-x|^2 grad(1/f)(x) . (y-x).
double geodesic_expansion(const ScalarField& f, std::span<const double> x,
                          std::span<const double> y);

}  // namespace rdlab
