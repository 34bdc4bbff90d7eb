#pragma once

#include <cstdint>

#include "rdlab/diffusion.hpp"
#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"

namespace rdlab {

// Gaussian stand-in for the reflected transition density over one sampling
// interval: centered at the start point with covariance 2 D f(start) I. The
// exact kernel has no closed form; every likelihood quantity in this lab is
// computed through this proxy, which is the leading small-D approximation.
struct ProxyModel {
  FieldPtr f;
  double D = 0.0;

  void validate() const;
};

// log q_{f,D}(x,y) = -(d/2) log(4 pi D f(x)) - |y-x|^2 / (4 D f(x)).
double log_q(const ProxyModel& model, std::span<const double> x, std::span<const double> y);

// Sum of log q over the observed transitions; when restrict_interior is set,
// only transitions starting inside the enlarged support region count.
double proxy_loglik(const ProxyModel& model, const ObservationSet& obs,
                    const NestedRegions& regions, bool restrict_interior);

// Interior-restricted log-likelihood ratio log q_f - log q_{f0} summed over
// the observed transitions.
double loglik_ratio(const ScalarField& f, const ScalarField& f0, double D,
                    const ObservationSet& obs, const NestedRegions& regions);

struct KlEstimate {
  double mean_per_transition = 0.0;  // MC average of log(q_{f0}/q_f)
  double stderr_mean = 0.0;
  double var_sum = 0.0;   // MC variance of a sum of n_sum transition ratios
  double sup_distance = 0.0;  // lattice estimate of sup |f - f0|
  long long n_mc = 0;
  long long n_sum = 1;
};

// Monte Carlo divergence diagnostics between two proxy models: draws
// stationary (uniform) starts, proxy transitions under f0, and accumulates
// the per-transition log-ratio. Sum variances are estimated by grouping the
// draws into n_mc/n_sum independent sums.
KlEstimate mc_transition_kl(const ScalarField& f0, const ScalarField& f, double D,
                            const DomainSpec& dom, long long n_mc, std::uint64_t seed,
                            long long n_sum = 1);

}  // namespace rdlab
