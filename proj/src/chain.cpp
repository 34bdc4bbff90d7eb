#include "rdlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdlab/errors.hpp"
#include "rdlab/estimator.hpp"
#include "rdlab/model.hpp"

namespace rdlab {

namespace {

// Integrated autocorrelation time by the initial-positive-sequence rule;
// a flat trace (no data) counts every state as independent.
double trace_ess(const std::vector<double>& x) {
  long long n = static_cast<long long>(x.size());
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](long long k) {
    double acc = 0.0;
    for (long long i = 0; i + k < n; ++i) acc += (x[i] - mean) * (x[i + k] - mean);
    return acc / static_cast<double>(n);
  };
  double c0 = autocov(0);
  if (!(c0 > 1e-300)) return static_cast<double>(n);
  double tau = -1.0;
  for (long long m = 0; 2 * m + 1 < n / 2; ++m) {
    double gamma = autocov(2 * m) + autocov(2 * m + 1);
    if (gamma <= 0.0) break;
    tau += 2.0 * gamma / c0;
  }
  tau = std::max(tau, 1.0);
  return static_cast<double>(n) / tau;
}

}  // namespace

PseudoPosterior::PseudoPosterior(const ObservationSet& obs, const NestedRegions& regions,
                                 WaveletPriorSpec prior, double f_min, long long n_rescale)
    : regions_(regions), chi_(regions), f_min_(f_min) {
  prior.validate();
  if (!(f_min > 0.0 && f_min < 1.0))
    throw ConfigError("pseudo-posterior: f_min must lie in (0,1)");
  basis_ = prior.basis;
  wavelet_s_ = prior.s;
  dofs_ = static_cast<int>(basis_->size());
  div_ = rescale_divisor(n_rescale, prior.s, regions.domain.dim);
  D_ = obs.D;
  dim_ = static_cast<double>(regions.domain.dim);
  build_rows(obs);
}

PseudoPosterior::PseudoPosterior(const ObservationSet& obs, const NestedRegions& regions,
                                 MaternSpec prior, double f_min, long long n_rescale)
    : regions_(regions), chi_(regions), f_min_(f_min) {
  prior.validate();
  if (!(f_min > 0.0 && f_min < 1.0))
    throw ConfigError("pseudo-posterior: f_min must lie in (0,1)");
  if (prior.dim() != 1 || regions.domain.dim != 1)
    throw ConfigError("pseudo-posterior: the dense-grid prior is one-dimensional only");
  int n = static_cast<int>(prior.grid.size());
  if (n < 2) throw ConfigError("pseudo-posterior: grid needs at least two points");
  double lo = prior.grid.front()[0], hi = prior.grid.back()[0];
  double h = (hi - lo) / (n - 1);
  for (int i = 0; i + 1 < n; ++i)
    if (std::abs(prior.grid[i + 1][0] - prior.grid[i][0] - h) > 1e-9 * std::max(h, 1.0))
      throw ConfigError("pseudo-posterior: grid must be a uniform ascending lattice");
  matern_.emplace(prior);
  dofs_ = n;
  div_ = rescale_divisor(n_rescale, prior.s, 1);
  D_ = obs.D;
  dim_ = 1.0;
  build_rows(obs);
}

void PseudoPosterior::build_rows(const ObservationSet& obs) {
  if (obs.points.size() < 2) return;  // empty data: log-likelihood is identically 0
  if (!(D_ > 0.0)) throw ConfigError("pseudo-posterior: sampling interval must be positive");
  int d = regions_.domain.dim;
  if (obs.dim() != d) throw ConfigError("pseudo-posterior: observation dimension mismatch");
  std::vector<std::pair<std::uint32_t, double>> scratch;
  rows_.reserve(obs.points.size() - 1);
  for (std::size_t i = 1; i < obs.points.size(); ++i) {
    const Vec& x = obs.points[i - 1];
    if (!regions_.in_O0_delta(x)) continue;
    Row row;
    row.chi = chi_.value(x);
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      double diff = obs.points[i][k] - x[k];
      r2 += diff * diff;
    }
    row.r2 = r2;
    if (basis_) {
      sparse_row(*basis_, x, scratch);
      row.psi.assign(scratch.begin(), scratch.end());
    } else {
      const auto& grid = matern_->spec().grid;
      int n = static_cast<int>(grid.size());
      double lo = grid.front()[0];
      double h = (grid.back()[0] - lo) / (n - 1);
      double t = (x[0] - lo) / h;
      int cell = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
      double frac = std::clamp(t - cell, 0.0, 1.0);
      row.psi = {{static_cast<std::uint32_t>(cell), 1.0 - frac},
                 {static_cast<std::uint32_t>(cell + 1), frac}};
    }
    rows_.push_back(std::move(row));
  }
}

Vec PseudoPosterior::draw_prior(RngStream& rng) const {
  if (matern_) return matern_->draw(rng);
  Vec w(dofs_);
  for (int k = 0; k < dofs_; ++k)
    w[k] = std::exp2(-static_cast<double>(basis_->indices[k].level) * wavelet_s_) * rng.normal();
  return w;
}

double PseudoPosterior::loglik(const Vec& w) const {
  if (static_cast<int>(w.size()) != dofs_)
    throw ConfigError("pseudo-posterior: state size mismatch");
  if (rows_.empty()) return 0.0;
  double acc = 0.0;
  double inv4d = 1.0 / (4.0 * D_);
  double log_scale = std::log(4.0 * std::numbers::pi * D_);
  for (const Row& row : rows_) {
    double v = 0.0;
    for (auto [k, p] : row.psi) v += p * w[k];
    double f = f_min_ + (1.0 - f_min_) * std::exp(row.chi * v / div_);
    acc += -0.5 * dim_ * (log_scale + std::log(f)) - row.r2 * inv4d / f;
  }
  return acc;
}

FieldPtr PseudoPosterior::make_field(const Vec& w) const {
  if (static_cast<int>(w.size()) != dofs_)
    throw ConfigError("pseudo-posterior: state size mismatch");
  Vec scaled(w);
  for (double& v : scaled) v /= div_;
  FieldPtr amplitude;
  if (basis_) {
    amplitude = std::make_shared<WaveletSumField>(basis_, std::move(scaled), 0.0);
  } else {
    const auto& grid = matern_->spec().grid;
    amplitude = std::make_shared<GridField>(Vec{grid.front()[0]}, Vec{grid.back()[0]},
                                            std::vector<int>{dofs_}, std::move(scaled));
  }
  return std::make_shared<LinkedField>(std::move(amplitude), chi_, f_min_);
}

bool pcn_step(const PseudoPosterior& post, ChainState& state, double beta, RngStream& rng) {
  if (!(beta > 0.0) || beta > 1.0) throw ConfigError("pcn: beta must lie in (0,1]");
  Vec fresh = post.draw_prior(rng);
  double keep = std::sqrt(1.0 - beta * beta);
  Vec proposal(fresh.size());
  for (std::size_t k = 0; k < fresh.size(); ++k)
    proposal[k] = keep * state.w[k] + beta * fresh[k];
  double ll = post.loglik(proposal);
  if (std::log(rng.uniform01()) < ll - state.loglik) {
    state.w = std::move(proposal);
    state.loglik = ll;
    return true;
  }
  return false;
}

PosteriorSummary run_chain(const PseudoPosterior& post, const PcnConfig& cfg,
                           const ScalarField* f0) {
  if (cfg.iters <= cfg.burn_in || cfg.burn_in < 0)
    throw ConfigError("chain: iters must exceed burn_in");
  if (cfg.thin < 1) throw ConfigError("chain: thin must be at least 1");
  if (!(cfg.beta > 0.0) || cfg.beta > 1.0) throw ConfigError("pcn: beta must lie in (0,1]");

  const DomainSpec& dom = post.regions().domain;
  int d = dom.dim;
  int npts = std::max(2, cfg.mean_grid > 0 ? cfg.mean_grid : (d == 1 ? 257 : d == 2 ? 65 : 17));
  int l2_pts = d == 1 ? 512 : d == 2 ? 64 : 16;

  Vec lo(d), hi(d);
  if (dom.kind == DomainSpec::Kind::rectangle) {
    lo = dom.lower;
    hi = dom.upper;
  } else {
    for (int k = 0; k < d; ++k) {
      lo[k] = dom.center[k] - dom.radius;
      hi[k] = dom.center[k] + dom.radius;
    }
  }
  long long lattice_size = 1;
  for (int k = 0; k < d; ++k) lattice_size *= npts;
  std::vector<Vec> lattice;
  lattice.reserve(lattice_size);
  {
    std::vector<int> idx(d, 0);
    Vec p(d);
    while (true) {
      for (int k = 0; k < d; ++k)
        p[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (npts - 1.0);
      lattice.push_back(p);
      int axis = 0;
      while (axis < d && ++idx[axis] == npts) idx[axis++] = 0;
      if (axis == d) break;
    }
  }

  RngStream rng = RngStream::substream(cfg.seed, 0x9c4a, 0);
  ChainState state;
  state.w = post.draw_prior(rng);
  state.loglik = post.loglik(state.w);

  PosteriorSummary out;
  out.mean_w.assign(post.dofs(), 0.0);
  std::vector<double> mean_vals(lattice.size(), 0.0);

  double beta = cfg.beta;
  long long window_acc = 0, window_n = 0;
  long long post_acc = 0, post_n = 0;
  for (long long it = 0; it < cfg.iters; ++it) {
    bool accepted = pcn_step(post, state, beta, rng);
    if (it < cfg.burn_in) {
      if (cfg.adapt_beta) {
        window_acc += accepted;
        if (++window_n == 50) {
          double rate = window_acc / 50.0;
          if (rate < 0.15) beta *= 0.8;
          if (rate > 0.40) beta = std::min(1.0, beta * 1.25);
          window_acc = window_n = 0;
        }
      }
      continue;
    }
    post_acc += accepted;
    ++post_n;
    if ((it - cfg.burn_in) % cfg.thin != 0) continue;

    ++out.kept;
    out.loglik_trace.push_back(state.loglik);
    out.accept_trace.push_back(accepted ? 1 : 0);
    for (int k = 0; k < post.dofs(); ++k) out.mean_w[k] += state.w[k];
    FieldPtr fld = post.make_field(state.w);
    for (std::size_t i = 0; i < lattice.size(); ++i) mean_vals[i] += fld->value(lattice[i]);
    if (f0) out.l2_trace.push_back(l2_error(*fld, *f0, dom, l2_pts));
  }

  for (double& v : out.mean_w) v /= static_cast<double>(out.kept);
  for (double& v : mean_vals) v /= static_cast<double>(out.kept);
  out.mean_field = std::make_shared<GridField>(lo, hi, std::vector<int>(d, npts),
                                               std::move(mean_vals));
  out.accept_rate = post_n > 0 ? static_cast<double>(post_acc) / post_n : 0.0;
  out.beta_final = beta;
  out.ess = trace_ess(out.loglik_trace);
  if (out.accept_rate < 0.01 || out.accept_rate > 0.99)
    out.warning = "acceptance rate " + std::to_string(out.accept_rate) +
                  " after tuning is outside [0.01, 0.99]";
  return out;
}

double contraction_diag(const std::vector<double>& l2_trace, double M, double xi) {
  if (l2_trace.empty()) throw ConfigError("contraction: empty distance trace");
  if (M < 0.0 || !(xi > 0.0)) throw ConfigError("contraction: need M >= 0 and xi > 0");
  long long count = 0;
  for (double v : l2_trace) count += (v >= M * xi);
  return static_cast<double>(count) / static_cast<double>(l2_trace.size());
}

double contraction_diag(const PosteriorSummary& summary, double M, double xi) {
  return contraction_diag(summary.l2_trace, M, xi);
}

}  // namespace rdlab
