// Command-line front end: single-run operations (simulate, estimate,
// posterior) and the sweep drivers (rate-study, assouad-study, kl-sweep),
// plus the ratecalc arithmetic helper. Every run drops a manifest.csv with
// config/input hashes and wall-clock runtimes next to its outputs.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rdlab/chain.hpp"
#include "rdlab/config.hpp"
#include "rdlab/csv.hpp"
#include "rdlab/diffusion.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/estimator.hpp"
#include "rdlab/field.hpp"
#include "rdlab/model.hpp"
#include "rdlab/prior.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/studies.hpp"
#include "rdlab/wavelet.hpp"

namespace {

using namespace rdlab;

using Manifest = std::vector<std::pair<std::string, std::string>>;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string file_hash(const std::string& path) {
  return git_blob_sha1(read_text_file(path));
}

// Load + validate the config, with --seed/--out taking precedence. The
// subcommand pins the experiment kind so one config file can drive several
// operations.
ExperimentConfig load_cfg(const GlobalOpts& g, const std::string& kind) {
  if (g.config_path.empty())
    throw ConfigError("this subcommand needs --config <file>");
  ExperimentConfig cfg = config_from_json_text(read_text_file(g.config_path));
  if (!kind.empty()) cfg.kind = kind;
  if (g.seed_given) cfg.seed = g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

Manifest base_manifest(const std::string& subcommand, const ExperimentConfig& cfg) {
  Manifest m;
  m.emplace_back("tool", "rdlab");
  m.emplace_back("subcommand", subcommand);
  m.emplace_back("config_hash", git_blob_sha1(config_canonical_json(cfg)));
  m.emplace_back("seed", std::to_string(cfg.seed));
  return m;
}

int quad_for_dim(int dim) { return dim == 1 ? 2048 : dim == 2 ? 181 : 41; }
int dump_grid(int dim) { return dim == 1 ? 257 : dim == 2 ? 65 : 17; }

int cmd_simulate(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_cfg(g, "");
  NestedRegions regions = config_regions(cfg);
  FieldPtr f0 = make_truth_field(cfg, regions);

  // One path at the first grid size; larger entries belong to the studies.
  const long long N = cfg.n_grid.front();
  SdeConfig sde;
  sde.f = f0;
  sde.drift_mode = DriftMode::gradient;
  sde.D = sampling_interval(cfg, N);
  sde.N = N;
  sde.substeps = cfg.substeps > 0
                     ? cfg.substeps
                     : suggest_substeps(sde.D, cfg.delta,
                                        field_sup_estimate(*f0, regions.domain));
  sde.seed = RngStream::substream(cfg.seed, 0x51e0, 0).next_u64();
  sde.regions = regions;
  ObservationSet obs = sample_path(sde);
  obs.f_truth_id = cfg.truth;

  const std::string csv = join(cfg.out_dir, "observations.csv");
  const std::string sidecar = join(cfg.out_dir, "observations.json");
  write_observations(csv, sidecar, obs);

  Manifest m = base_manifest("simulate", cfg);
  m.emplace_back("N", std::to_string(N));
  m.emplace_back("D", format_double(sde.D));
  m.emplace_back("substeps", std::to_string(sde.substeps));
  m.emplace_back("observations_hash", file_hash(csv));
  m.emplace_back("sidecar_hash", file_hash(sidecar));
  m.emplace_back("runtime_s", format_double(seconds_since(t0)));
  write_manifest(join(cfg.out_dir, "manifest.csv"), m);

  std::cout << "simulate: wrote " << csv << " (N=" << N << ", D=" << sde.D
            << ", substeps=" << sde.substeps << ")\n";
  return 0;
}

int cmd_estimate(const GlobalOpts& g, const std::string& obs_path,
                 std::string sidecar_path) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_cfg(g, "");
  if (sidecar_path.empty()) {
    std::filesystem::path p(obs_path);
    if (p.extension() != ".csv")
      throw ConfigError("estimate: cannot derive the sidecar name from '" + obs_path +
                        "'; pass --sidecar");
    sidecar_path = p.replace_extension(".json").string();
  }
  ObservationSet obs = read_observations(obs_path, sidecar_path);
  if (obs.dim() != cfg.dim)
    throw ConfigError("estimate: observation dimension " + std::to_string(obs.dim()) +
                      " does not match the config dimension " + std::to_string(cfg.dim));

  NestedRegions regions = config_regions(cfg);
  FamilyPtr family = build_family(cfg.wavelet_p);
  const int feasible = minimal_feasible_J0(*family, regions);
  const int J0 = cfg.j0 > 0 ? cfg.j0 : feasible;
  const int J = level_for(cfg.j_scale, cfg.s, cfg.dim, obs.n_increments(), J0);
  BasisPtr basis = build_basis(family, regions, J0, J);
  EstimatorOutput out = estimate_f(obs, basis, regions, cfg.clip_M);

  const std::string coeff_path = join(cfg.out_dir, "coefficients.csv");
  const std::string field_path = join(cfg.out_dir, "f_hat.csv");
  write_coefficients(coeff_path, *basis, out.coeffs);
  write_field_dump(field_path, *out.f_hat, *out.f_hat_star, regions.domain,
                   dump_grid(cfg.dim));

  Manifest m = base_manifest("estimate", cfg);
  m.emplace_back("observations_hash", file_hash(obs_path));
  m.emplace_back("sidecar_hash", file_hash(sidecar_path));
  m.emplace_back("N", std::to_string(obs.n_increments()));
  m.emplace_back("J0", std::to_string(J0));
  m.emplace_back("J", std::to_string(J));
  m.emplace_back("basis_size", std::to_string(basis->size()));
  m.emplace_back("solver_rank", std::to_string(out.report.rank));
  m.emplace_back("solver_residual", format_double(out.report.residual_norm));
  m.emplace_back("coefficients_hash", file_hash(coeff_path));
  m.emplace_back("field_hash", file_hash(field_path));
  m.emplace_back("runtime_s", format_double(seconds_since(t0)));
  write_manifest(join(cfg.out_dir, "manifest.csv"), m);

  std::cout << "estimate: " << basis->size() << " coefficients (J0=" << J0 << ", J=" << J
            << ", rank=" << out.report.rank << ") -> " << coeff_path << "\n";
  return 0;
}

int cmd_posterior(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_cfg(g, "posterior");
  NestedRegions regions = config_regions(cfg);
  FieldPtr f0 = make_truth_field(cfg, regions);

  // Flagship chain at the first grid size: simulate, sample, dump the trace
  // and the posterior-mean field.
  const long long N = cfg.n_grid.front();
  SdeConfig sde;
  sde.f = f0;
  sde.drift_mode = DriftMode::gradient;
  sde.D = sampling_interval(cfg, N);
  sde.N = N;
  sde.substeps = cfg.substeps > 0
                     ? cfg.substeps
                     : suggest_substeps(sde.D, cfg.delta,
                                        field_sup_estimate(*f0, regions.domain));
  sde.seed = RngStream::substream(cfg.seed, 0x90e0, 0).next_u64();
  sde.regions = regions;
  ObservationSet obs = sample_path(sde);

  PcnConfig pcn;
  pcn.iters = cfg.chain_iters;
  pcn.burn_in = cfg.chain_burn;
  pcn.thin = cfg.chain_thin;
  pcn.beta = cfg.chain_beta;
  pcn.adapt_beta = cfg.adapt_beta;
  pcn.seed = RngStream::substream(cfg.seed, 0x90e1, 0).next_u64();

  PosteriorSummary summary;
  int dofs = 0;
  if (cfg.prior == "wavelet") {
    FamilyPtr family = build_family(cfg.prior_p);
    const int J0 = minimal_feasible_J0(*family, regions);
    const int J =
        cfg.prior_j > 0 ? cfg.prior_j : level_for(1.0, cfg.prior_s, cfg.dim, N, J0);
    WaveletPriorSpec prior;
    prior.s = cfg.prior_s;
    prior.basis = build_basis(family, regions, J0, J);
    PseudoPosterior post(obs, regions, prior, cfg.f_min, N);
    dofs = post.dofs();
    summary = run_chain(post, pcn, f0.get());
  } else {
    MaternSpec prior;
    prior.s = cfg.prior_s;
    prior.grid = make_lattice(regions.domain, cfg.matern_grid);
    PseudoPosterior post(obs, regions, prior, cfg.f_min, N);
    dofs = post.dofs();
    summary = run_chain(post, pcn, f0.get());
  }

  const std::string trace_path = join(cfg.out_dir, "trace.csv");
  const std::string mean_path = join(cfg.out_dir, "posterior_mean.csv");
  write_chain_trace(trace_path, summary);
  ClippedField mean_star(summary.mean_field, cfg.clip_M);
  write_field_dump(mean_path, *summary.mean_field, mean_star, regions.domain,
                   dump_grid(cfg.dim));
  const double err =
      l2_error(*summary.mean_field, *f0, regions.domain, quad_for_dim(cfg.dim));

  Manifest m = base_manifest("posterior", cfg);
  m.emplace_back("N", std::to_string(N));
  m.emplace_back("D", format_double(sde.D));
  m.emplace_back("prior", cfg.prior);
  m.emplace_back("dofs", std::to_string(dofs));
  m.emplace_back("accept_rate", format_double(summary.accept_rate));
  m.emplace_back("beta_final", format_double(summary.beta_final));
  m.emplace_back("ess", format_double(summary.ess));
  m.emplace_back("kept", std::to_string(summary.kept));
  m.emplace_back("mean_l2_error", format_double(err));
  if (!summary.warning.empty()) m.emplace_back("warning", summary.warning);
  m.emplace_back("trace_hash", file_hash(trace_path));
  m.emplace_back("mean_hash", file_hash(mean_path));

  // With a grid of at least 3 sizes, also run the contraction study.
  if (cfg.n_grid.size() >= 3) {
    StudyResult r = run_posterior_study(cfg);
    write_study_csv(join(cfg.out_dir, "study.csv"), r);
    m.emplace_back("study_slope", format_double(r.slope));
    m.emplace_back("study_slope_se", format_double(r.slope_se));
    m.emplace_back("study_summary", r.summary_line);
    std::cout << r.summary_line << "\n";
  }
  m.emplace_back("runtime_s", format_double(seconds_since(t0)));
  write_manifest(join(cfg.out_dir, "manifest.csv"), m);

  std::cout << "posterior: accept=" << summary.accept_rate << " ess=" << summary.ess
            << " mean-L2-error=" << err << " -> " << trace_path << "\n";
  return 0;
}

int run_study_command(const GlobalOpts& g, const std::string& kind) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_cfg(g, kind);

  StudyResult r;
  std::string csv_name;
  if (kind == "rate-study") {
    r = run_rate_study(cfg);
    csv_name = "rate.csv";
  } else if (kind == "assouad-study") {
    r = run_assouad_study(cfg);
    csv_name = "assouad.csv";
  } else {
    r = run_kl_sweep(cfg);
    csv_name = "kl.csv";
  }

  const std::string csv_path = join(cfg.out_dir, csv_name);
  if (kind == "kl-sweep")
    write_kl_csv(csv_path, r);
  else
    write_study_csv(csv_path, r);

  Manifest m = base_manifest(kind, cfg);
  m.emplace_back("metric", r.metric);
  m.emplace_back("cells", std::to_string(r.cells.size()));
  m.emplace_back("slope", format_double(r.slope));
  m.emplace_back("slope_se", format_double(r.slope_se));
  if (kind == "kl-sweep") m.emplace_back("var_slope", format_double(r.slope2));
  for (std::size_t i = 0; i < r.xs.size(); ++i) {
    m.emplace_back("x_" + std::to_string(i), format_double(r.xs[i]));
    m.emplace_back("aggregate_" + std::to_string(i), format_double(r.median_error[i]));
    m.emplace_back("aggregate_se_" + std::to_string(i), format_double(r.median_se[i]));
    if (i < r.extra.size())
      m.emplace_back("extra_" + std::to_string(i), format_double(r.extra[i]));
  }
  m.emplace_back("summary", r.summary_line);
  m.emplace_back("output_hash", file_hash(csv_path));
  m.emplace_back("runtime_s", format_double(seconds_since(t0)));
  write_manifest(join(cfg.out_dir, "manifest.csv"), m);

  std::cout << r.summary_line << "\n";
  std::cout << "wrote " << csv_path << "\n";
  return 0;
}

int cmd_ratecalc(int d, double a, double s, double N) {
  RateParams rp;
  rp.d = d;
  rp.a = a;
  rp.s = s;
  rp.N = N;
  SequenceBundle seq = rate_sequences(rp);
  RemarkReport rem = check_remark_conditions(d, a, s);

  std::printf("d = %d\n", d);
  std::printf("a = %.17g\n", a);
  std::printf("s = %.17g\n", s);
  std::printf("N = %.17g\n", N);
  std::printf("alpha_d = %d\n", alpha_d(d));
  std::printf("s_star = %.17g\n", s_star(d, a));
  std::printf("smoothness_threshold = %.17g\n", rem.threshold);
  std::printf("condition_ok = %s\n", rem.ok ? "true" : "false");
  if (!rem.detail.empty()) std::printf("condition_detail = %s\n", rem.detail.c_str());
  std::printf("D = %.17g\n", seq.D);
  std::printf("eps_N = %.17g\n", seq.eps);
  std::printf("xi_N = %.17g\n", seq.xi);
  std::printf("E_N = %.17g\n", seq.E);
  std::printf("V_N = %.17g\n", seq.V);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reflected-diffusion estimation laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON experiment config");
  app.add_option("--out", g.out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (overrides the config)");

  // fallthrough: let the global --config/--out/--seed appear after the
  // subcommand name as well as before it.
  app.add_subcommand("simulate", "sample one observed path and write the CSV pair")
      ->fallthrough();
  auto* est = app.add_subcommand("estimate", "least-squares fit from an observation CSV");
  est->fallthrough();
  std::string obs_path, sidecar_path;
  est->add_option("--obs", obs_path, "observations CSV written by simulate")->required();
  est->add_option("--sidecar", sidecar_path, "JSON sidecar (default: derived from --obs)");
  app.add_subcommand("posterior", "pCN chain: trace, posterior mean, contraction study")
      ->fallthrough();
  app.add_subcommand("rate-study", "convergence-rate sweep over the N grid")
      ->fallthrough();
  app.add_subcommand("assouad-study", "worst-case risk over sign-flip alternatives")
      ->fallthrough();
  app.add_subcommand("kl-sweep", "proxy transition divergence scaling sweep")
      ->fallthrough();

  auto* rc = app.add_subcommand("ratecalc", "print the rate sequences for (d, a, s, N)");
  int rc_d = 1;
  double rc_a = 0.6, rc_s = 2.0, rc_N = 1e4;
  rc->add_option("--d", rc_d, "dimension");
  rc->add_option("--a", rc_a, "sampling exponent, D = N^-a");
  rc->add_option("--s", rc_s, "smoothness");
  rc->add_option("--N", rc_N, "sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(g);
    if (app.got_subcommand("estimate")) return cmd_estimate(g, obs_path, sidecar_path);
    if (app.got_subcommand("posterior")) return cmd_posterior(g);
    if (app.got_subcommand("rate-study")) return run_study_command(g, "rate-study");
    if (app.got_subcommand("assouad-study")) return run_study_command(g, "assouad-study");
    if (app.got_subcommand("kl-sweep")) return run_study_command(g, "kl-sweep");
    if (app.got_subcommand("ratecalc")) return cmd_ratecalc(rc_d, rc_a, rc_s, rc_N);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
