#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdlab/diffusion.hpp"
#include "rdlab/prior.hpp"

namespace rdlab {

// Pseudo-posterior for the diffusivity: Gaussian prior on the raw amplitude w
// (wavelet coefficients or grid values), proxy Gaussian transition likelihood
// restricted to transitions starting in the enlarged support region. All the
// per-transition quantities that the likelihood needs are precomputed, so one
// likelihood evaluation is a sparse pass over the active transitions.
class PseudoPosterior {
 public:
  PseudoPosterior(const ObservationSet& obs, const NestedRegions& regions,
                  WaveletPriorSpec prior, double f_min, long long n_rescale);
  // Matern variant on a uniform 1-d lattice (dense factorization cost).
  PseudoPosterior(const ObservationSet& obs, const NestedRegions& regions,
                  MaternSpec prior, double f_min, long long n_rescale);

  int dofs() const { return dofs_; }
  double divisor() const { return div_; }
  double f_min() const { return f_min_; }
  long long active_transitions() const { return static_cast<long long>(rows_.size()); }
  const NestedRegions& regions() const { return regions_; }

  Vec draw_prior(RngStream& rng) const;
  double loglik(const Vec& w) const;
  FieldPtr make_field(const Vec& w) const;

 private:
  void build_rows(const ObservationSet& obs);

  struct Row {
    std::vector<std::pair<std::uint32_t, double>> psi;  // amplitude design
    double chi = 0.0;
    double r2 = 0.0;  // squared displacement of the transition
  };
  std::vector<Row> rows_;
  NestedRegions regions_;
  CutoffField chi_;
  double D_ = 0.0;
  double dim_ = 0.0;
  int dofs_ = 0;
  double div_ = 1.0;
  double f_min_ = 0.25;

  // prior representation (exactly one is active)
  BasisPtr basis_;
  double wavelet_s_ = 0.0;
  std::optional<MaternSampler> matern_;
};

struct ChainState {
  Vec w;
  double loglik = 0.0;
};

struct PcnConfig {
  long long iters = 2000;
  long long burn_in = 500;
  int thin = 1;
  double beta = 0.3;
  bool adapt_beta = true;  // tune toward acceptance in [0.15, 0.4] during burn-in
  std::uint64_t seed = 1;
  int mean_grid = 0;  // posterior-mean lattice points per axis; 0 = pick by dim
};

struct PosteriorSummary {
  Vec mean_w;
  FieldPtr mean_field;
  double accept_rate = 0.0;  // after burn-in
  double beta_final = 0.0;
  std::vector<double> loglik_trace;  // kept states only
  std::vector<std::uint8_t> accept_trace;  // 1 if the move at that state was accepted
  std::vector<double> l2_trace;      // ||f - f0||_2 per kept state when truth given
  double ess = 0.0;                  // of the log-likelihood trace
  long long kept = 0;
  std::string warning;
};

// One preconditioned-Crank-Nicolson move; returns whether the proposal was
// accepted (the state is updated in place). The prior term cancels, so the
// acceptance ratio is the likelihood difference alone.
bool pcn_step(const PseudoPosterior& post, ChainState& state, double beta, RngStream& rng);

PosteriorSummary run_chain(const PseudoPosterior& post, const PcnConfig& cfg,
                           const ScalarField* f0 = nullptr);

// Fraction of kept states at L2 distance >= M * xi from the truth.
double contraction_diag(const std::vector<double>& l2_trace, double M, double xi);
double contraction_diag(const PosteriorSummary& summary, double M, double xi);

}  // namespace rdlab
