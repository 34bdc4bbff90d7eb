#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdlab/config.hpp"

namespace rdlab {

// One study cell: a single simulate/estimate (or chain, or MC) run. A failed
// cell keeps its slot with ok = false and the reason in note; aggregation
// skips it and the study carries on.
struct StudyCell {
  double x = 0.0;  // abscissa the cell contributes to: N, or epsilon, or a sum length
  long long N = 0;
  int replicate = 0;
  int group = 0;  // corner index in the worst-case study, 0 elsewhere
  double error = 0.0;  // the study's error metric for this cell
  double runtime_s = 0.0;
  bool ok = true;
  std::string note;
};

// Divergence sweep rows, one per mc_transition_kl call.
struct KlRow {
  double epsilon = 0.0;
  long long n_sum = 1;
  double mean_per_transition = 0.0;
  double var_sum = 0.0;
  double stderr_mean = 0.0;
};

struct StudyResult {
  std::string metric;  // label of the error column
  std::vector<StudyCell> cells;

  std::vector<double> xs;            // distinct abscissae, ascending
  std::vector<double> median_error;  // per-x aggregate over ok cells
  std::vector<double> median_se;     // bootstrap standard error of the aggregate
  std::vector<double> extra;         // study-specific per-x values (see each driver)

  // log-log OLS of the aggregate on the abscissa; bootstrap standard error
  // over replicates. NaN when fewer than 3 abscissae survived.
  double slope = 0.0;
  double slope_se = 0.0;
  double slope2 = 0.0;  // kl-sweep only: variance-vs-sum-length slope

  std::vector<KlRow> kl_rows;  // kl-sweep only
  std::string summary_line;
};

// Simulate -> least-squares estimate -> L2 error per (N, replicate); the
// per-N aggregate is the median error.
StudyResult run_rate_study(const ExperimentConfig& cfg);

// Worst-case empirical risk (mean squared L2 error per corner, maximized over
// a random subset of perturbation-family corners) per N. extra holds the
// average-corner risk.
StudyResult run_assouad_study(const ExperimentConfig& cfg);

// Simulate -> pCN chain per (N, replicate); the error is the posterior-mean
// L2 distance to the truth. extra holds the median contraction-diagnostic
// fraction at the config's M with xi_N = N^{-s/(2s+d)} at the prior s.
StudyResult run_posterior_study(const ExperimentConfig& cfg);

// mc_transition_kl over the amplitude grid (slope vs epsilon) and the
// sum-length grid at the largest amplitude (slope2 of the sum variance).
StudyResult run_kl_sweep(const ExperimentConfig& cfg);

// Ordinary least squares slope of log y on log x.
double ols_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Study rows as `N,replicate,l2_error,runtime_s` (the error column carries
// the study's metric; failed cells write nan). kl-sweep results use the
// dedicated writer instead.
void write_study_csv(const std::string& path, const StudyResult& r);
void write_kl_csv(const std::string& path, const StudyResult& r);

}  // namespace rdlab
