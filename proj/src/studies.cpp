#include "rdlab/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "rdlab/chain.hpp"
#include "rdlab/csv.hpp"
#include "rdlab/diffusion.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/estimator.hpp"
#include "rdlab/field.hpp"
#include "rdlab/likelihood.hpp"
#include "rdlab/model.hpp"
#include "rdlab/prior.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/wavelet.hpp"

namespace rdlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kBootstrap = 200;

// Study tags for per-cell substreams. Cells are seeded by (grid index,
// replicate), not by execution order, so any scheduling — including a future
// work pool — reproduces the same numbers.
constexpr std::uint64_t kTagRateSim = 0x5a01;
constexpr std::uint64_t kTagAssouadSim = 0x5a02;
constexpr std::uint64_t kTagAssouadCorners = 0x5a12;
constexpr std::uint64_t kTagPosteriorSim = 0x5a03;
constexpr std::uint64_t kTagPosteriorChain = 0x5a13;
constexpr std::uint64_t kTagKlMean = 0x5a04;
constexpr std::uint64_t kTagKlVar = 0x5a14;
constexpr std::uint64_t kTagBootstrap = 0xb005;

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t i,
                        std::uint64_t j) {
  return RngStream::substream(seed, tag, (i << 32) | j).next_u64();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNan;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int quad_points(int dim) { return dim == 1 ? 2048 : dim == 2 ? 181 : 41; }

// Errors of the ok cells, grouped by abscissa in first-seen order.
struct Grouped {
  std::vector<double> xs;
  std::vector<std::vector<double>> errs;
};

Grouped group_ok_cells(const std::vector<StudyCell>& cells) {
  Grouped g;
  std::map<double, std::size_t> pos;
  for (const StudyCell& c : cells) {
    auto it = pos.find(c.x);
    if (it == pos.end()) {
      it = pos.emplace(c.x, g.xs.size()).first;
      g.xs.push_back(c.x);
      g.errs.emplace_back();
    }
    if (c.ok) g.errs[it->second].push_back(c.error);
  }
  return g;
}

std::vector<double> resample(const std::vector<double>& v, RngStream& rng) {
  std::vector<double> out(v.size());
  for (double& x : out) x = v[rng.next_u64() % v.size()];
  return out;
}

// Median aggregate per abscissa plus a bootstrap (over replicates) standard
// error for both the aggregates and the log-log slope. Abscissae whose cells
// all failed are dropped before fitting; a fit needs at least 3 survivors.
void aggregate_medians(StudyResult& r, std::uint64_t seed, std::uint64_t study_tag) {
  Grouped g = group_ok_cells(r.cells);
  r.xs.clear();
  r.median_error.clear();
  std::vector<std::vector<double>> kept;
  for (std::size_t i = 0; i < g.xs.size(); ++i) {
    if (g.errs[i].empty()) continue;
    r.xs.push_back(g.xs[i]);
    r.median_error.push_back(median_of(g.errs[i]));
    kept.push_back(g.errs[i]);
  }
  const std::size_t nx = r.xs.size();
  r.median_se.assign(nx, 0.0);
  r.slope = nx >= 3 ? ols_loglog_slope(r.xs, r.median_error) : kNan;
  r.slope_se = kNan;
  if (nx == 0) return;

  RngStream boot = RngStream::substream(seed, kTagBootstrap, study_tag);
  std::vector<std::vector<double>> medians_b(nx);
  std::vector<double> slopes_b;
  for (int b = 0; b < kBootstrap; ++b) {
    std::vector<double> med(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      med[i] = median_of(resample(kept[i], boot));
      medians_b[i].push_back(med[i]);
    }
    if (nx >= 3) slopes_b.push_back(ols_loglog_slope(r.xs, med));
  }
  for (std::size_t i = 0; i < nx; ++i) r.median_se[i] = sd_of(medians_b[i]);
  if (nx >= 3) r.slope_se = sd_of(slopes_b);
}

std::string count_note(const std::vector<StudyCell>& cells) {
  int ok = 0;
  for (const StudyCell& c : cells) ok += c.ok ? 1 : 0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d/%zu cells ok", ok, cells.size());
  return buf;
}

struct SimSetup {
  NestedRegions regions;
  FieldPtr f0;
  FamilyPtr family;
  int J0 = 0;
  double f_sup = 1.0;
};

SimSetup make_sim_setup(const ExperimentConfig& cfg) {
  SimSetup s;
  s.regions = config_regions(cfg);
  s.f0 = make_truth_field(cfg, s.regions);
  s.family = build_family(cfg.wavelet_p);
  const int feasible = minimal_feasible_J0(*s.family, s.regions);
  s.J0 = cfg.j0 > 0 ? cfg.j0 : feasible;
  if (s.J0 < feasible) {
    std::ostringstream os;
    os << "config: j0: level " << cfg.j0 << " puts supports outside the inner region"
       << " (need >= " << feasible << ")";
    throw ConfigError(os.str());
  }
  s.f_sup = field_sup_estimate(*s.f0, s.regions.domain);
  return s;
}

ObservationSet simulate_cell(const ExperimentConfig& cfg, const SimSetup& s,
                             FieldPtr truth, double f_sup, long long N,
                             std::uint64_t seed) {
  SdeConfig sde;
  sde.f = std::move(truth);
  sde.drift_mode = DriftMode::gradient;
  sde.D = sampling_interval(cfg, N);
  sde.N = N;
  sde.substeps =
      cfg.substeps > 0 ? cfg.substeps : suggest_substeps(sde.D, cfg.delta, f_sup);
  sde.seed = seed;
  sde.regions = s.regions;
  return sample_path(sde);
}

}  // namespace

double ols_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      continue;
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  if (lx.size() < 2) return kNan;
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return kNan;
  return sxy / sxx;
}

StudyResult run_rate_study(const ExperimentConfig& cfg) {
  cfg.validate();
  SimSetup s = make_sim_setup(cfg);
  const int quad = quad_points(cfg.dim);

  StudyResult r;
  r.metric = "l2_error";
  std::map<int, BasisPtr> basis_by_level;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const long long N = cfg.n_grid[ni];
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      StudyCell cell;
      cell.x = static_cast<double>(N);
      cell.N = N;
      cell.replicate = rep;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const int J = level_for(cfg.j_scale, cfg.s, cfg.dim, N, s.J0);
        BasisPtr& basis = basis_by_level[J];
        if (!basis) basis = build_basis(s.family, s.regions, s.J0, J);
        ObservationSet obs = simulate_cell(cfg, s, s.f0, s.f_sup, N,
                                           cell_seed(cfg.seed, kTagRateSim, ni, rep));
        EstimatorOutput out = estimate_f(obs, basis, s.regions, cfg.clip_M);
        cell.error = l2_error(*out.f_hat_star, *s.f0, s.regions.domain, quad);
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.note = e.what();
      }
      cell.runtime_s = seconds_since(t0);
      r.cells.push_back(std::move(cell));
    }
  }
  aggregate_medians(r, cfg.seed, kTagRateSim);

  std::ostringstream os;
  os << "rate-study: slope " << r.slope << " +- " << r.slope_se << " over " << r.xs.size()
     << " sample sizes (" << count_note(r.cells) << ")";
  r.summary_line = os.str();
  return r;
}

StudyResult run_assouad_study(const ExperimentConfig& cfg) {
  cfg.validate();
  NestedRegions regions = config_regions(cfg);
  FamilyPtr family = build_family(cfg.wavelet_p);
  const int J0 = cfg.j0 > 0 ? cfg.j0 : minimal_feasible_J0(*family, regions);
  const int quad = quad_points(cfg.dim);

  // Perturbation carriers live inside the inner region so every member stays
  // in the model class; reuse the inner box itself as the carrier cube.
  const DomainSpec carrier = regions.K;

  StudyResult r;
  r.metric = "worst_corner_risk";
  std::map<int, BasisPtr> basis_by_level;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const long long N = cfg.n_grid[ni];

    AssouadFamily fam;
    std::vector<std::vector<int>> corners;
    std::string build_note;
    try {
      fam = build_assouad_family(regions, family, cfg.s, static_cast<double>(N), carrier,
                                 cfg.gamma_scale, cfg.assouad_j_scale, 0.1,
                                 cfg.holder_budget);
      // Random corner subset (all corners when the family is small enough).
      const std::size_t nb = fam.size();
      RngStream pick = RngStream::substream(cfg.seed, kTagAssouadCorners, ni);
      if (nb <= 20 && (1ull << nb) <= static_cast<std::uint64_t>(cfg.corners)) {
        for (std::uint64_t mask = 0; mask < (1ull << nb); ++mask) {
          std::vector<int> sg(nb);
          for (std::size_t k = 0; k < nb; ++k) sg[k] = (mask >> k) & 1 ? 1 : -1;
          corners.push_back(std::move(sg));
        }
      } else {
        for (int c = 0; c < cfg.corners; ++c) {
          std::vector<int> sg(nb);
          for (std::size_t k = 0; k < nb; ++k) sg[k] = pick.next_u64() & 1 ? 1 : -1;
          corners.push_back(std::move(sg));
        }
      }
    } catch (const std::exception& e) {
      build_note = e.what();
    }

    if (!build_note.empty()) {
      // No family at this N: record the failure once per scheduled cell.
      for (int c = 0; c < cfg.corners; ++c)
        for (int rep = 0; rep < cfg.replicates; ++rep) {
          StudyCell cell;
          cell.x = static_cast<double>(N);
          cell.N = N;
          cell.group = c;
          cell.replicate = c * cfg.replicates + rep;
          cell.ok = false;
          cell.note = build_note;
          r.cells.push_back(std::move(cell));
        }
      continue;
    }

    const double f_sup = 1.0 + fam.sup_amplitude;
    for (std::size_t c = 0; c < corners.size(); ++c) {
      FieldPtr truth = fam.member(corners[c]);
      for (int rep = 0; rep < cfg.replicates; ++rep) {
        StudyCell cell;
        cell.x = static_cast<double>(N);
        cell.N = N;
        cell.group = static_cast<int>(c);
        cell.replicate = static_cast<int>(c) * cfg.replicates + rep;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const int J = level_for(cfg.j_scale, cfg.s, cfg.dim, N, J0);
          BasisPtr& basis = basis_by_level[J];
          if (!basis) basis = build_basis(family, regions, J0, J);
          SdeConfig sde;
          sde.f = truth;
          sde.drift_mode = DriftMode::gradient;
          sde.D = sampling_interval(cfg, N);
          sde.N = N;
          sde.substeps = cfg.substeps > 0 ? cfg.substeps
                                          : suggest_substeps(sde.D, cfg.delta, f_sup);
          sde.seed = cell_seed(cfg.seed, kTagAssouadSim, ni,
                               static_cast<std::uint64_t>(cell.replicate));
          sde.regions = regions;
          ObservationSet obs = sample_path(sde);
          EstimatorOutput out = estimate_f(obs, basis, regions, cfg.clip_M);
          cell.error = l2_error(*out.f_hat_star, *truth, regions.domain, quad);
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.note = e.what();
        }
        cell.runtime_s = seconds_since(t0);
        r.cells.push_back(std::move(cell));
      }
    }
  }

  // Per N: mean squared error within each corner, then the worst corner
  // (aggregate) and the corner average (extra).
  std::map<double, std::map<int, std::vector<double>>> by_x;
  for (const StudyCell& c : r.cells)
    if (c.ok) by_x[c.x][c.group].push_back(c.error);

  r.xs.clear();
  r.median_error.clear();
  r.median_se.clear();
  r.extra.clear();
  std::vector<std::vector<std::vector<double>>> kept;  // [x][corner] -> errors
  for (auto& [x, groups] : by_x) {
    std::vector<std::vector<double>> per_corner;
    for (auto& [c, errs] : groups) per_corner.push_back(errs);
    if (per_corner.empty()) continue;
    double worst = 0.0, avg = 0.0;
    for (const auto& errs : per_corner) {
      std::vector<double> sq;
      sq.reserve(errs.size());
      for (double e : errs) sq.push_back(e * e);
      const double risk = mean_of(sq);
      worst = std::max(worst, risk);
      avg += risk;
    }
    avg /= static_cast<double>(per_corner.size());
    r.xs.push_back(x);
    r.median_error.push_back(worst);
    r.extra.push_back(avg);
    kept.push_back(std::move(per_corner));
  }

  const std::size_t nx = r.xs.size();
  r.median_se.assign(nx, 0.0);
  r.slope = nx >= 3 ? ols_loglog_slope(r.xs, r.median_error) : kNan;
  r.slope_se = kNan;
  if (nx > 0) {
    RngStream boot = RngStream::substream(cfg.seed, kTagBootstrap, kTagAssouadSim);
    std::vector<std::vector<double>> worst_b(nx);
    std::vector<double> slopes_b;
    for (int b = 0; b < kBootstrap; ++b) {
      std::vector<double> w(nx);
      for (std::size_t i = 0; i < nx; ++i) {
        double worst = 0.0;
        for (const auto& errs : kept[i]) {
          std::vector<double> re = resample(errs, boot);
          for (double& e : re) e *= e;
          worst = std::max(worst, mean_of(re));
        }
        w[i] = worst;
        worst_b[i].push_back(worst);
      }
      if (nx >= 3) slopes_b.push_back(ols_loglog_slope(r.xs, w));
    }
    for (std::size_t i = 0; i < nx; ++i) r.median_se[i] = sd_of(worst_b[i]);
    if (nx >= 3) r.slope_se = sd_of(slopes_b);
  }

  std::ostringstream os;
  os << "assouad-study: worst-corner risk slope " << r.slope << " +- " << r.slope_se
     << " over " << nx << " sample sizes (" << count_note(r.cells) << ")";
  r.summary_line = os.str();
  return r;
}

StudyResult run_posterior_study(const ExperimentConfig& cfg) {
  cfg.validate();
  SimSetup s = make_sim_setup(cfg);
  const int quad = quad_points(cfg.dim);

  // Prior representation shared across cells (wavelet basis cached by level).
  FamilyPtr prior_family;
  int prior_J0 = 0;
  if (cfg.prior == "wavelet") {
    prior_family = build_family(cfg.prior_p);
    prior_J0 = minimal_feasible_J0(*prior_family, s.regions);
  }

  StudyResult r;
  r.metric = "posterior_mean_l2";
  std::map<int, BasisPtr> basis_by_level;
  std::map<double, std::vector<double>> fractions;  // x -> contraction fractions
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const long long N = cfg.n_grid[ni];
    const double xi = std::pow(static_cast<double>(N),
                               -cfg.prior_s / (2.0 * cfg.prior_s + cfg.dim));
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      StudyCell cell;
      cell.x = static_cast<double>(N);
      cell.N = N;
      cell.replicate = rep;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ObservationSet obs = simulate_cell(cfg, s, s.f0, s.f_sup, N,
                                           cell_seed(cfg.seed, kTagPosteriorSim, ni, rep));
        PcnConfig pcn;
        pcn.iters = cfg.chain_iters;
        pcn.burn_in = cfg.chain_burn;
        pcn.thin = cfg.chain_thin;
        pcn.beta = cfg.chain_beta;
        pcn.adapt_beta = cfg.adapt_beta;
        pcn.seed = cell_seed(cfg.seed, kTagPosteriorChain, ni, rep);

        PosteriorSummary summary;
        if (cfg.prior == "wavelet") {
          const int J = cfg.prior_j > 0
                            ? cfg.prior_j
                            : level_for(1.0, cfg.prior_s, cfg.dim, N, prior_J0);
          BasisPtr& basis = basis_by_level[J];
          if (!basis) basis = build_basis(prior_family, s.regions, prior_J0, J);
          WaveletPriorSpec prior;
          prior.s = cfg.prior_s;
          prior.basis = basis;
          PseudoPosterior post(obs, s.regions, prior, cfg.f_min, N);
          summary = run_chain(post, pcn, s.f0.get());
        } else {
          MaternSpec prior;
          prior.s = cfg.prior_s;
          prior.grid = make_lattice(s.regions.domain, cfg.matern_grid);
          PseudoPosterior post(obs, s.regions, prior, cfg.f_min, N);
          summary = run_chain(post, pcn, s.f0.get());
        }
        cell.error = l2_error(*summary.mean_field, *s.f0, s.regions.domain, quad);
        fractions[cell.x].push_back(contraction_diag(summary, cfg.contraction_M, xi));
        if (!summary.warning.empty()) cell.note = summary.warning;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.note = e.what();
      }
      cell.runtime_s = seconds_since(t0);
      r.cells.push_back(std::move(cell));
    }
  }
  aggregate_medians(r, cfg.seed, kTagPosteriorSim);
  r.extra.clear();
  for (double x : r.xs) {
    auto it = fractions.find(x);
    r.extra.push_back(it == fractions.end() ? kNan : median_of(it->second));
  }

  std::ostringstream os;
  os << "posterior-study: posterior-mean error slope " << r.slope
     << "; median mass fraction outside M*xi_N:";
  for (std::size_t i = 0; i < r.xs.size(); ++i)
    os << " " << r.extra[i] << "@N=" << static_cast<long long>(r.xs[i]);
  os << " (" << count_note(r.cells) << ")";
  r.summary_line = os.str();
  return r;
}

StudyResult run_kl_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  NestedRegions regions = config_regions(cfg);
  Vec center(static_cast<std::size_t>(cfg.dim));
  for (int j = 0; j < cfg.dim; ++j)
    center[static_cast<std::size_t>(j)] = 0.5 * (cfg.domain_lo + cfg.domain_hi);
  const auto f0 = std::make_shared<ConstantField>(cfg.dim, 1.0);

  StudyResult r;
  r.metric = "kl_per_transition";
  std::map<double, std::vector<double>> means;

  for (std::size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
    const double eps = cfg.eps_grid[ei];
    const auto f = std::make_shared<CosBumpField>(regions, 1.0, eps, cfg.truth_freq, center);
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      StudyCell cell;
      cell.x = eps;
      cell.N = 1;
      cell.replicate = rep;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        KlEstimate est = mc_transition_kl(*f0, *f, cfg.kl_D, regions.domain, cfg.kl_draws,
                                          cell_seed(cfg.seed, kTagKlMean, ei, rep), 1);
        cell.error = est.mean_per_transition;
        means[eps].push_back(est.mean_per_transition);
        KlRow row;
        row.epsilon = eps;
        row.n_sum = 1;
        row.mean_per_transition = est.mean_per_transition;
        row.var_sum = est.var_sum;
        row.stderr_mean = est.stderr_mean;
        r.kl_rows.push_back(row);
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.note = e.what();
      }
      cell.runtime_s = seconds_since(t0);
      r.cells.push_back(std::move(cell));
    }
  }

  r.xs = cfg.eps_grid;
  std::sort(r.xs.begin(), r.xs.end());
  r.median_error.clear();
  r.median_se.clear();
  std::vector<double> fit_x, fit_y;
  for (double eps : r.xs) {
    auto it = means.find(eps);
    if (it == means.end()) {
      r.median_error.push_back(kNan);
      r.median_se.push_back(kNan);
      continue;
    }
    r.median_error.push_back(median_of(it->second));
    r.median_se.push_back(sd_of(it->second) /
                          std::sqrt(static_cast<double>(it->second.size())));
    fit_x.push_back(eps);
    fit_y.push_back(r.median_error.back());
  }
  r.slope = fit_x.size() >= 3 ? ols_loglog_slope(fit_x, fit_y) : kNan;
  r.slope_se = kNan;

  // Sum-variance sweep at the largest amplitude: variance of a sum of n
  // transition ratios should grow linearly in n.
  const double eps_big = r.xs.back();
  const auto f_big =
      std::make_shared<CosBumpField>(regions, 1.0, eps_big, cfg.truth_freq, center);
  std::vector<double> var_x, var_y;
  for (std::size_t mi = 0; mi < cfg.kl_sum_grid.size(); ++mi) {
    const long long m = cfg.kl_sum_grid[mi];
    try {
      KlEstimate est = mc_transition_kl(*f0, *f_big, cfg.kl_D, regions.domain,
                                        cfg.kl_draws, cell_seed(cfg.seed, kTagKlVar, mi, 0),
                                        m);
      KlRow row;
      row.epsilon = eps_big;
      row.n_sum = m;
      row.mean_per_transition = est.mean_per_transition;
      row.var_sum = est.var_sum;
      row.stderr_mean = est.stderr_mean;
      r.kl_rows.push_back(row);
      var_x.push_back(static_cast<double>(m));
      var_y.push_back(est.var_sum);
    } catch (const std::exception&) {
      // recorded implicitly by the missing row
    }
  }
  r.slope2 = var_x.size() >= 3 ? ols_loglog_slope(var_x, var_y) : kNan;

  std::ostringstream os;
  os << "kl-sweep: mean-vs-amplitude slope " << r.slope << " (expect ~2), "
     << "sum-variance slope " << r.slope2 << " (expect ~1) (" << count_note(r.cells)
     << ")";
  r.summary_line = os.str();
  return r;
}

void write_study_csv(const std::string& path, const StudyResult& r) {
  std::ostringstream os;
  os << "N,replicate,l2_error,runtime_s\n";
  for (const StudyCell& c : r.cells) {
    os << c.N << "," << c.replicate << ","
       << (c.ok ? format_double(c.error) : "nan") << "," << format_double(c.runtime_s)
       << "\n";
  }
  write_text_file(path, os.str());
}

void write_kl_csv(const std::string& path, const StudyResult& r) {
  std::ostringstream os;
  os << "epsilon,N,mean_per_transition,var_sum,stderr\n";
  for (const KlRow& row : r.kl_rows) {
    os << format_double(row.epsilon) << "," << row.n_sum << ","
       << format_double(row.mean_per_transition) << "," << format_double(row.var_sum)
       << "," << format_double(row.stderr_mean) << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace rdlab
