#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/rng.hpp"

namespace rdlab {

// How the drift term is supplied: the gradient of the diffusivity itself
// (which makes the uniform distribution invariant), an explicit vector field,
// or no drift at all.
enum class DriftMode { gradient, generic, none };

struct SdeConfig {
  FieldPtr f;
  DriftMode drift_mode = DriftMode::gradient;
  std::vector<FieldPtr> drift_g;  // generic mode: one component per axis
  double D = 0.01;                // sampling interval
  long long N = 1;                // number of observed increments
  int substeps = 16;              // internal Euler steps per interval
  std::uint64_t seed = 1;
  NestedRegions regions;

  // Sampling-regime diagnostics: the asymptotics of interest have
  // N*D growing while N*D^2 shrinks.
  double nd() const { return static_cast<double>(N) * D; }
  double nd2() const { return static_cast<double>(N) * D * D; }

  void validate() const;  // throws ConfigError on a bad combination
};

struct ObservationSet {
  std::vector<Vec> points;  // N+1 states, all inside the closed domain
  double D = 0.0;
  std::uint64_t seed = 0;
  std::string f_truth_id;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  long long n_increments() const { return static_cast<long long>(points.size()) - 1; }
};

struct PathDiagnostics {
  std::vector<double> histogram;  // occupation mass per cell, sums to 1
  int bins_per_axis = 0;
  double increment_mean = 0.0;  // pooled over coordinates
  double increment_var = 0.0;
  long long boundary_hits = 0;  // observed states sitting on the boundary
  long long states = 0;
};

// Substep count such that the Euler step resolves both the sampling interval
// and the boundary layer of width delta for diffusivities bounded by f_sup.
int suggest_substeps(double D, double delta, double f_sup);

// Uniform draw on the domain; balls use rejection from the bounding box.
// If `attempts` is given it accumulates the number of candidates tried.
Vec initial_draw(const DomainSpec& dom, RngStream& rng, long long* attempts = nullptr);

// Projected Euler scheme: from a uniform start, each substep proposes
// x + b*dt + sqrt(2 f(x) dt) * xi and projects back onto the domain;
// every m-th substep is recorded as an observation.
ObservationSet sample_path(const SdeConfig& cfg);

// Normalized squared displacements Y_i = |X_i - X_{i-1}|^2 / (2 d D).
std::vector<double> increments_Y(const ObservationSet& obs);

// Fraction of length-D subintervals, started uniformly in start_region, whose
// substep path attempts to leave the domain. cfg.N counts the replicates.
double boundary_hit_frequency(const SdeConfig& cfg, const DomainSpec& start_region);

// Histogram of the observed states with `bins` cells per axis, plus increment
// moments and boundary-contact counts. Cells tile the domain's bounding box
// when one is given, else the tight box around the data.
PathDiagnostics occupation_histogram(const ObservationSet& obs, int bins,
                                     const DomainSpec* dom = nullptr);

}  // namespace rdlab
