#include "rdlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "rdlab/csv.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/model.hpp"

namespace rdlab {

namespace {

const std::set<std::string> kKinds = {"simulate",   "estimate",      "posterior",
                                      "rate-study", "assouad-study", "kl-sweep"};
const std::set<std::string> kTruths = {"constant", "cos_bump", "linked_bump"};
const std::set<std::string> kPriors = {"wavelet", "matern"};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config: " + key + ": " + why);
}

double as_double(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

long long as_ll(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<long long>();
}

int as_int(const nlohmann::json& v, const std::string& key) {
  long long x = as_ll(v, key);
  if (x < -2147483648LL || x > 2147483647LL) bad(key, "out of range");
  return static_cast<int>(x);
}

bool as_bool(const nlohmann::json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string as_str(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

std::vector<long long> as_ll_vec(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected an array of integers");
  std::vector<long long> out;
  for (const auto& e : v) out.push_back(as_ll(e, key));
  return out;
}

std::vector<double> as_double_vec(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, key));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kKinds.count(kind)) bad("kind", "unknown experiment kind '" + kind + "'");
  if (dim < 1 || dim > 3) bad("dim", "supported dimensions are 1..3");
  if (!(domain_hi > domain_lo)) bad("domain", "need domain_hi > domain_lo");
  if (!(delta > 0.0)) bad("delta", "must be positive");
  if (6.0 * delta >= domain_hi - domain_lo)
    bad("delta", "6*delta must be smaller than the domain side for the nested regions");
  if (!kTruths.count(truth)) bad("truth", "unknown truth field '" + truth + "'");
  if (truth == "constant" && !(truth_value > 0.0)) bad("truth_value", "must be positive");
  if (truth_amp < 0.0) bad("truth_amp", "must be nonnegative");
  if (truth == "cos_bump" && truth_amp >= 1.0)
    bad("truth_amp", "amplitude >= 1 lets the diffusivity touch zero");
  if (!(truth_freq > 0.0)) bad("truth_freq", "must be positive");
  if (!(a > 0.5) || !(a < 1.0)) bad("a", "the interval exponent must lie in (1/2, 1)");
  if (fixed_D < 0.0) bad("fixed_D", "must be nonnegative (0 = use N^-a)");
  if (substeps < 0) bad("substeps", "must be nonnegative (0 = automatic)");
  if (n_grid.empty()) bad("n_grid", "must not be empty");
  for (long long n : n_grid)
    if (n < 2) bad("n_grid", "every N must be at least 2");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) bad("n_grid", "must be strictly increasing");
  if (replicates < 1) bad("replicates", "must be at least 1");
  if (!(s > 0.0)) bad("s", "must be positive");
  if (wavelet_p < 2 || wavelet_p > 10) bad("wavelet_p", "supported orders are 2..10");
  if (j0 < 0) bad("j0", "must be nonnegative (0 = minimal feasible)");
  if (!(j_scale > 0.0)) bad("j_scale", "must be positive");
  if (!(clip_M > 0.0)) bad("clip_M", "must be positive");
  if (!kPriors.count(prior)) bad("prior", "unknown prior '" + prior + "'");
  if (prior_p < 2 || prior_p > 10) bad("prior_p", "supported orders are 2..10");
  if (!(prior_s > 0.0)) bad("prior_s", "must be positive");
  if (prior == "matern" && !(prior_s > 0.5 * dim))
    bad("prior_s", "the matern prior needs s > dim/2");
  if (prior_j < 0) bad("prior_j", "must be nonnegative (0 = level rule)");
  if (!(f_min > 0.0) || !(f_min < 1.0)) bad("f_min", "must lie strictly inside (0, 1)");
  if (matern_grid < 2 || matern_grid > 4096) bad("matern_grid", "supported sizes are 2..4096");
  if (chain_iters < 1) bad("chain_iters", "must be positive");
  if (chain_burn < 0 || chain_burn >= chain_iters)
    bad("chain_burn", "must be nonnegative and smaller than chain_iters");
  if (chain_thin < 1) bad("chain_thin", "must be at least 1");
  if (!(chain_beta > 0.0) || chain_beta > 1.0) bad("chain_beta", "must lie in (0, 1]");
  if (contraction_M < 0.0) bad("contraction_M", "must be nonnegative");
  if (eps_grid.empty()) bad("eps_grid", "must not be empty");
  for (double e : eps_grid)
    if (!(e > 0.0) || e >= 1.0) bad("eps_grid", "amplitudes must lie in (0, 1)");
  if (kl_sum_grid.empty()) bad("kl_sum_grid", "must not be empty");
  for (long long m : kl_sum_grid)
    if (m < 1) bad("kl_sum_grid", "sum lengths must be positive");
  if (!(kl_D > 0.0)) bad("kl_D", "must be positive");
  if (kl_draws < 100) bad("kl_draws", "needs at least 100 draws");
  if (corners < 1) bad("corners", "must be at least 1");
  if (!(gamma_scale > 0.0)) bad("gamma_scale", "must be positive");
  if (!(assouad_j_scale > 0.0)) bad("assouad_j_scale", "must be positive");
  if (!(holder_budget > 0.0)) bad("holder_budget", "must be positive");
  if (out_dir.empty()) bad("out_dir", "must not be empty");

  // slope fits need at least three grid points (the posterior driver skips
  // the fit on shorter grids instead, so single-N chain runs stay possible)
  if ((kind == "rate-study" || kind == "assouad-study") && n_grid.size() < 3)
    bad("n_grid", "the " + kind + " slope fit needs at least 3 values of N");
  if (kind == "kl-sweep" && (eps_grid.size() < 3 || kl_sum_grid.size() < 3))
    bad("eps_grid", "the kl-sweep slope fits need at least 3 amplitudes and 3 sum lengths");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: the top level must be a JSON object");

  ExperimentConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "kind") c.kind = as_str(val, key);
    else if (key == "dim") c.dim = as_int(val, key);
    else if (key == "domain_lo") c.domain_lo = as_double(val, key);
    else if (key == "domain_hi") c.domain_hi = as_double(val, key);
    else if (key == "delta") c.delta = as_double(val, key);
    else if (key == "truth") c.truth = as_str(val, key);
    else if (key == "truth_value") c.truth_value = as_double(val, key);
    else if (key == "truth_amp") c.truth_amp = as_double(val, key);
    else if (key == "truth_freq") c.truth_freq = as_double(val, key);
    else if (key == "a") c.a = as_double(val, key);
    else if (key == "fixed_D") c.fixed_D = as_double(val, key);
    else if (key == "substeps") c.substeps = as_int(val, key);
    else if (key == "n_grid") c.n_grid = as_ll_vec(val, key);
    else if (key == "replicates") c.replicates = as_int(val, key);
    else if (key == "s") c.s = as_double(val, key);
    else if (key == "wavelet_p") c.wavelet_p = as_int(val, key);
    else if (key == "j0") c.j0 = as_int(val, key);
    else if (key == "j_scale") c.j_scale = as_double(val, key);
    else if (key == "clip_M") c.clip_M = as_double(val, key);
    else if (key == "prior") c.prior = as_str(val, key);
    else if (key == "prior_p") c.prior_p = as_int(val, key);
    else if (key == "prior_s") c.prior_s = as_double(val, key);
    else if (key == "prior_j") c.prior_j = as_int(val, key);
    else if (key == "f_min") c.f_min = as_double(val, key);
    else if (key == "matern_grid") c.matern_grid = as_int(val, key);
    else if (key == "chain_iters") c.chain_iters = as_ll(val, key);
    else if (key == "chain_burn") c.chain_burn = as_ll(val, key);
    else if (key == "chain_thin") c.chain_thin = as_int(val, key);
    else if (key == "chain_beta") c.chain_beta = as_double(val, key);
    else if (key == "adapt_beta") c.adapt_beta = as_bool(val, key);
    else if (key == "contraction_M") c.contraction_M = as_double(val, key);
    else if (key == "eps_grid") c.eps_grid = as_double_vec(val, key);
    else if (key == "kl_sum_grid") c.kl_sum_grid = as_ll_vec(val, key);
    else if (key == "kl_D") c.kl_D = as_double(val, key);
    else if (key == "kl_draws") c.kl_draws = as_ll(val, key);
    else if (key == "corners") c.corners = as_int(val, key);
    else if (key == "gamma_scale") c.gamma_scale = as_double(val, key);
    else if (key == "assouad_j_scale") c.assouad_j_scale = as_double(val, key);
    else if (key == "holder_budget") c.holder_budget = as_double(val, key);
    else if (key == "seed") {
      if (!val.is_number_integer() && !val.is_number_unsigned()) bad(key, "expected an integer");
      c.seed = val.get<std::uint64_t>();
    } else if (key == "out_dir") c.out_dir = as_str(val, key);
    else bad(key, "unknown key");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json_text(read_text_file(path));
}

std::string config_canonical_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = c.kind;
  j["dim"] = c.dim;
  j["domain_lo"] = c.domain_lo;
  j["domain_hi"] = c.domain_hi;
  j["delta"] = c.delta;
  j["truth"] = c.truth;
  j["truth_value"] = c.truth_value;
  j["truth_amp"] = c.truth_amp;
  j["truth_freq"] = c.truth_freq;
  j["a"] = c.a;
  j["fixed_D"] = c.fixed_D;
  j["substeps"] = c.substeps;
  j["n_grid"] = c.n_grid;
  j["replicates"] = c.replicates;
  j["s"] = c.s;
  j["wavelet_p"] = c.wavelet_p;
  j["j0"] = c.j0;
  j["j_scale"] = c.j_scale;
  j["clip_M"] = c.clip_M;
  j["prior"] = c.prior;
  j["prior_p"] = c.prior_p;
  j["prior_s"] = c.prior_s;
  j["prior_j"] = c.prior_j;
  j["f_min"] = c.f_min;
  j["matern_grid"] = c.matern_grid;
  j["chain_iters"] = c.chain_iters;
  j["chain_burn"] = c.chain_burn;
  j["chain_thin"] = c.chain_thin;
  j["chain_beta"] = c.chain_beta;
  j["adapt_beta"] = c.adapt_beta;
  j["contraction_M"] = c.contraction_M;
  j["eps_grid"] = c.eps_grid;
  j["kl_sum_grid"] = c.kl_sum_grid;
  j["kl_D"] = c.kl_D;
  j["kl_draws"] = c.kl_draws;
  j["corners"] = c.corners;
  j["gamma_scale"] = c.gamma_scale;
  j["assouad_j_scale"] = c.assouad_j_scale;
  j["holder_budget"] = c.holder_budget;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j.dump();
}

NestedRegions config_regions(const ExperimentConfig& cfg) {
  return build_nested_regions(DomainSpec::cube(cfg.dim, cfg.domain_lo, cfg.domain_hi), cfg.delta);
}

FieldPtr make_truth_field(const ExperimentConfig& cfg, const NestedRegions& regions) {
  if (cfg.truth == "constant") return std::make_shared<ConstantField>(cfg.dim, cfg.truth_value);
  Vec center(cfg.dim, 0.5 * (cfg.domain_lo + cfg.domain_hi));
  if (cfg.truth == "cos_bump")
    return std::make_shared<CosBumpField>(regions, 1.0, cfg.truth_amp, cfg.truth_freq, center);
  // linked_bump: the raw amplitude is a bump, the link keeps f positive and
  // pins f = 1 off the perturbation support
  auto amplitude =
      std::make_shared<CosBumpField>(regions, 0.0, cfg.truth_amp, cfg.truth_freq, center);
  return compose_field(amplitude, CutoffField(regions), cfg.f_min);
}

double sampling_interval(const ExperimentConfig& cfg, long long N) {
  if (cfg.fixed_D > 0.0) return cfg.fixed_D;
  return std::pow(static_cast<double>(N), -cfg.a);
}

int level_for(double j_scale, double s, int d, long long N, int J0) {
  double target =
      std::log2(j_scale) + std::log2(static_cast<double>(N)) / (2.0 * s + static_cast<double>(d));
  return std::max(J0, static_cast<int>(std::lround(target)));
}

double field_sup_estimate(const ScalarField& f, const DomainSpec& dom) {
  const int d = dom.dim;
  const int n = d == 1 ? 2048 : d == 2 ? 128 : 32;
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    if (dom.kind == DomainSpec::Kind::rectangle) {
      lo[i] = dom.lower[i];
      hi[i] = dom.upper[i];
    } else {
      lo[i] = dom.center[i] - dom.radius;
      hi[i] = dom.center[i] + dom.radius;
    }
  }
  double sup = 0.0;
  std::vector<int> idx(d, 0);
  Vec x(d);
  for (;;) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (idx[i] + 0.5) * (hi[i] - lo[i]) / n;
    if (contains(dom, x)) sup = std::max(sup, std::abs(f.value(x)));
    int j = 0;
    while (j < d && ++idx[j] == n) idx[j++] = 0;
    if (j == d) break;
  }
  return 1.05 * sup;
}

}  // namespace rdlab
