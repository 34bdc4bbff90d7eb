#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"

namespace rdlab {

// One experiment, one flat JSON object. Every knob has a desk-scale default
// so small configs stay small; unknown keys are rejected so typos fail
// loudly instead of silently running the default.
struct ExperimentConfig {
  std::string kind = "rate-study";  // simulate | estimate | posterior |
                                    // rate-study | assouad-study | kl-sweep

  // domain [lo, hi]^dim and the nested interior regions at inset delta
  int dim = 1;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  double delta = 0.11;

  // truth diffusivity: "constant" (truth_value), "cos_bump"
  // (1 + amp * cutoff * prod cos(2 pi freq (x_i - center))), or "linked_bump"
  // (the link applied to an amp-sized bump amplitude, so sup f = phi(amp))
  std::string truth = "cos_bump";
  double truth_value = 1.0;
  double truth_amp = 0.5;
  double truth_freq = 1.0;

  // sampling regime: D = N^-a unless fixed_D > 0; substeps 0 resolves the
  // boundary layer automatically
  double a = 0.6;
  double fixed_D = 0.0;
  int substeps = 0;

  // study grids
  std::vector<long long> n_grid = {1024, 4096, 16384};
  int replicates = 4;

  // least-squares estimator: 2^J ~= j_scale * N^{1/(2s+d)}, never below J0
  double s = 2.0;
  int wavelet_p = 4;
  int j0 = 0;  // 0 = minimal feasible for the family and regions
  double j_scale = 32.0;
  double clip_M = 2.0;

  // prior and chain
  std::string prior = "wavelet";  // wavelet | matern
  int prior_p = 2;                // wavelet order of the prior basis
  double prior_s = 0.5;
  int prior_j = 0;  // 0 = estimator level rule at smoothness prior_s
  double f_min = 0.25;
  int matern_grid = 33;
  long long chain_iters = 2000;
  long long chain_burn = 500;
  int chain_thin = 1;
  double chain_beta = 0.3;
  bool adapt_beta = true;
  double contraction_M = 2.0;

  // divergence sweep
  std::vector<double> eps_grid = {0.2, 0.1, 0.05};
  std::vector<long long> kl_sum_grid = {10, 40, 160};
  double kl_D = 5e-4;
  long long kl_draws = 200000;

  // worst-case perturbation study
  int corners = 4;
  double gamma_scale = 1.0;
  double assouad_j_scale = 8.0;
  double holder_budget = 512.0;

  std::uint64_t seed = 1;
  std::string out_dir = ".";

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical (sorted-key) JSON of every field; its git blob id is the config
// hash recorded in manifests, independent of file formatting.
std::string config_canonical_json(const ExperimentConfig& cfg);

// Helpers shared by the drivers and the CLI.
NestedRegions config_regions(const ExperimentConfig& cfg);
FieldPtr make_truth_field(const ExperimentConfig& cfg, const NestedRegions& regions);
double sampling_interval(const ExperimentConfig& cfg, long long N);
int level_for(double j_scale, double s, int d, long long N, int J0);

// sup |f| over a lattice, slightly inflated; feeds the substep heuristic.
double field_sup_estimate(const ScalarField& f, const DomainSpec& dom);

}  // namespace rdlab
