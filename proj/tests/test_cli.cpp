// End-to-end tests of the rdlab binary: exit codes, output files, and the
// simulate -> estimate round trip. The binary path comes in via RDLAB_CLI_PATH.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "rdlab/config.hpp"
#include "rdlab/csv.hpp"
#include "rdlab/diffusion.hpp"

using namespace rdlab;

namespace {

std::string scratch(const std::string& name) {
  static const std::string root = [] {
    auto p = std::filesystem::temp_directory_path() / "rdlab_cli_test";
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
  }();
  return root + "/" + name;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string capture = scratch("capture_" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string(RDLAB_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(capture);
  return r;
}

std::string manifest_value(const std::string& path, const std::string& key) {
  CsvTable t = read_csv_table(path);
  for (const auto& row : t.raw_rows)
    if (row.size() == 2 && row[0] == key) return row[1];
  return {};
}

}  // namespace

TEST_CASE("usage and exit codes for malformed invocations") {
  RunResult none = run_cli("");
  CHECK(none.code == 2);
  CHECK(none.out.find("Usage") != std::string::npos);

  RunResult unknown = run_cli("frobnicate");
  CHECK(unknown.code == 2);
  CHECK(unknown.out.find("Usage") != std::string::npos);

  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("simulate").code == 2);  // no --config
  CHECK(run_cli("simulate --config /nonexistent/rdlab.json").code == 2);

  const std::string bad = scratch("bad.json");
  write_text_file(bad, "{this is not json");
  CHECK(run_cli("simulate --config " + bad).code == 2);

  const std::string junk_key = scratch("junk.json");
  write_text_file(junk_key, R"({"kind":"rate-study","bogus_knob":3})");
  CHECK(run_cli("simulate --config " + junk_key).code == 2);
}

TEST_CASE("ratecalc prints the sequence arithmetic") {
  RunResult r = run_cli("ratecalc --d 1 --a 0.6 --s 7");
  CHECK(r.code == 0);
  CHECK(r.out.find("alpha_d = 4") != std::string::npos);
  CHECK(r.out.find("s_star = 7") != std::string::npos);
  CHECK(r.out.find("condition_ok = false") != std::string::npos);  // boundary case s = s*
  CHECK(r.out.find("eps_N = ") != std::string::npos);
  CHECK(r.out.find("E_N = ") != std::string::npos);
  CHECK(r.out.find("V_N = ") != std::string::npos);

  CHECK(run_cli("ratecalc --d 12 --a 0.6 --s 8").out.find("alpha_d = 6") !=
        std::string::npos);
  CHECK(run_cli("ratecalc --d 1 --a 0.6 --s 7.5").out.find("condition_ok = true") !=
        std::string::npos);
}

TEST_CASE("simulate then estimate round-trips through the CSV pair") {
  const std::string cfg_path = scratch("roundtrip.json");
  const std::string out_dir = scratch("roundtrip_out");
  write_text_file(cfg_path, R"({
    "kind": "rate-study",
    "dim": 1,
    "delta": 0.11,
    "truth": "cos_bump",
    "truth_amp": 0.5,
    "a": 0.6,
    "n_grid": [512, 1024, 2048],
    "seed": 77,
    "out_dir": ")" + out_dir + R"("
  })");

  RunResult sim = run_cli("simulate --config " + cfg_path);
  CHECK(sim.code == 0);
  const std::string obs_csv = out_dir + "/observations.csv";
  REQUIRE(std::filesystem::exists(obs_csv));
  REQUIRE(std::filesystem::exists(out_dir + "/observations.json"));

  // The emitted pair reads back as N = first grid entry at D = N^-a.
  ObservationSet obs = read_observations(obs_csv, out_dir + "/observations.json");
  CHECK(obs.n_increments() == 512);
  CHECK(obs.dim() == 1);
  CHECK(obs.D == doctest::Approx(std::pow(512.0, -0.6)));
  CHECK(obs.f_truth_id == "cos_bump");

  // Manifest config hash matches an in-process hash of the canonical form.
  ExperimentConfig cfg = config_from_json_text(read_text_file(cfg_path));
  CHECK(manifest_value(out_dir + "/manifest.csv", "config_hash") ==
        git_blob_sha1(config_canonical_json(cfg)));
  CHECK(manifest_value(out_dir + "/manifest.csv", "observations_hash") ==
        git_blob_sha1(read_text_file(obs_csv)));

  const std::string est_dir = scratch("estimate_out");
  RunResult est =
      run_cli("estimate --config " + cfg_path + " --obs " + obs_csv + " --out " + est_dir);
  CHECK(est.code == 0);
  REQUIRE(std::filesystem::exists(est_dir + "/coefficients.csv"));
  REQUIRE(std::filesystem::exists(est_dir + "/f_hat.csv"));
  CsvTable coeffs = read_csv_table(est_dir + "/coefficients.csv");
  CHECK(coeffs.header == std::vector<std::string>{"l", "kind", "r1", "value"});
  CHECK(coeffs.rows.size() > 50);
  CsvTable dump = read_csv_table(est_dir + "/f_hat.csv");
  CHECK(dump.header == std::vector<std::string>{"x1", "f_hat", "f_hat_star"});
  for (const auto& row : dump.rows) {
    CHECK(row[2] >= 0.0);
    CHECK(row[2] <= 2.0);  // clipped column respects the truncation bound
  }
}

TEST_CASE("seed flag controls reproducibility") {
  const std::string cfg_path = scratch("seeds.json");
  write_text_file(cfg_path, R"({"kind":"rate-study","n_grid":[256,512,1024],"seed":1,)"
                            R"("out_dir":"unused"})");
  const std::string a = scratch("seed_a");
  const std::string b = scratch("seed_b");
  const std::string c = scratch("seed_c");
  CHECK(run_cli("simulate --config " + cfg_path + " --out " + a + " --seed 5").code == 0);
  CHECK(run_cli("simulate --config " + cfg_path + " --out " + b + " --seed 5").code == 0);
  CHECK(run_cli("simulate --config " + cfg_path + " --out " + c + " --seed 9").code == 0);
  const std::string obs_a = read_text_file(a + "/observations.csv");
  CHECK(obs_a == read_text_file(b + "/observations.csv"));
  CHECK(obs_a != read_text_file(c + "/observations.csv"));
}

TEST_CASE("estimate with no usable transitions exits with the numeric code") {
  // All states sit in the boundary layer, outside the filtering region, so
  // the regression has no rows: a numerical failure, not a config one.
  ObservationSet obs;
  obs.D = 0.01;
  obs.seed = 1;
  obs.f_truth_id = "constant";
  for (int i = 0; i <= 40; ++i) obs.points.push_back({0.05});
  const std::string obs_csv = scratch("stuck.csv");
  write_observations(obs_csv, scratch("stuck.json"), obs);

  const std::string cfg_path = scratch("stuck_cfg.json");
  write_text_file(cfg_path, R"({"kind":"rate-study","out_dir":")" + scratch("stuck_out") +
                                R"("})");
  RunResult r = run_cli("estimate --config " + cfg_path + " --obs " + obs_csv);
  CHECK(r.code == 3);
  CHECK(r.out.find("numerical failure") != std::string::npos);
}

TEST_CASE("posterior subcommand emits trace and posterior mean") {
  const std::string cfg_path = scratch("post.json");
  const std::string out_dir = scratch("post_out");
  write_text_file(cfg_path, R"({
    "kind": "posterior",
    "dim": 1,
    "delta": 0.15,
    "truth": "linked_bump",
    "truth_amp": 0.6,
    "a": 0.6,
    "n_grid": [512],
    "prior": "wavelet",
    "prior_p": 2,
    "prior_s": 0.5,
    "f_min": 0.25,
    "chain_iters": 200,
    "chain_burn": 50,
    "seed": 13,
    "out_dir": ")" + out_dir + R"("
  })");
  RunResult r = run_cli("posterior --config " + cfg_path);
  CHECK(r.code == 0);

  CsvTable trace = read_csv_table(out_dir + "/trace.csv");
  CHECK(trace.header ==
        std::vector<std::string>{"iter", "loglik", "accept", "l2_to_truth"});
  CHECK(trace.rows.size() == 150);  // iters - burn_in kept states
  for (const auto& row : trace.rows) {
    CHECK((row[2] == 0.0 || row[2] == 1.0));
    CHECK(row[3] > 0.0);
  }
  REQUIRE(std::filesystem::exists(out_dir + "/posterior_mean.csv"));
  const std::string accept = manifest_value(out_dir + "/manifest.csv", "accept_rate");
  CHECK(!accept.empty());
  const double rate = std::strtod(accept.c_str(), nullptr);
  CHECK(rate > 0.0);
  CHECK(rate <= 1.0);
}

TEST_CASE("kl-sweep subcommand writes the divergence table") {
  const std::string cfg_path = scratch("kl.json");
  const std::string out_dir = scratch("kl_out");
  write_text_file(cfg_path, R"({
    "kind": "kl-sweep",
    "eps_grid": [0.1, 0.2, 0.4],
    "kl_sum_grid": [4, 16, 64],
    "kl_draws": 50000,
    "replicates": 1,
    "seed": 3,
    "out_dir": ")" + out_dir + R"("
  })");
  RunResult r = run_cli("kl-sweep --config " + cfg_path);
  CHECK(r.code == 0);
  CHECK(r.out.find("kl-sweep") != std::string::npos);
  CsvTable t = read_csv_table(out_dir + "/kl.csv");
  CHECK(t.header ==
        std::vector<std::string>{"epsilon", "N", "mean_per_transition", "var_sum", "stderr"});
  CHECK(t.rows.size() == 6);  // 3 amplitude rows + 3 sum rows
  CHECK(manifest_value(out_dir + "/manifest.csv", "subcommand") == "kl-sweep");
}
