#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "melab/experiments.hpp"

using namespace melab;

namespace {

namespace fs = std::filesystem;

fs::path specs_dir() { return fs::path(MELAB_SPEC_DIR); }

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("melab_exp_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MELAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("counterexample experiment passes and writes its artifacts") {
  ExperimentConfig cfg;
  cfg.experiment = "counterexample";
  cfg.spec_path = specs_dir() / "full_shift.json";
  cfg.out_dir = fresh_dir("ce");
  cfg.ns = {100, 1000, 10000, 100000};
  const auto res = run_counterexample(cfg);
  CHECK(res.code == ExitCode::ok);
  CHECK(fs::exists(cfg.out_dir / "counterexample.csv"));
  CHECK(fs::exists(cfg.out_dir / "counterexample_summary.json"));
  const std::string summary = slurp(cfg.out_dir / "counterexample_summary.json");
  CHECK(summary.find("\"seed\"") != std::string::npos);
  CHECK(summary.find("\"verdict\"") != std::string::npos);
}

TEST_CASE("empty grids succeed with an empty table") {
  ExperimentConfig cfg;
  cfg.experiment = "counterexample";
  cfg.spec_path = specs_dir() / "full_shift.json";
  cfg.out_dir = fresh_dir("ce_empty");
  cfg.ns = {};
  const auto res = run_counterexample(cfg);
  CHECK(res.code == ExitCode::ok);
  CHECK(slurp(cfg.out_dir / "counterexample.csv") ==
        "n,a_n,H1,h_target,deviation_to_delta0\n");
}

TEST_CASE("identical seeds give byte-identical artifacts") {
  for (const std::string exp : {std::string("usc_scan"), std::string("mme_search")}) {
    ExperimentConfig cfg;
    cfg.experiment = exp;
    cfg.spec_path = specs_dir() / "golden_mean.json";
    cfg.families = 8;
    cfg.length = 48;
    cfg.seed = 12345;
    cfg.out_dir = fresh_dir(exp + "_a");
    run_experiment(cfg);
    const fs::path dir_a = cfg.out_dir;
    cfg.out_dir = fresh_dir(exp + "_b");
    run_experiment(cfg);
    const std::string main_csv = exp + ".csv";
    CHECK(slurp(dir_a / main_csv) == slurp(cfg.out_dir / main_csv));
  }
}

TEST_CASE("infinite-entropy specs are refused by the scan") {
  ExperimentConfig cfg;
  cfg.experiment = "usc_scan";
  cfg.spec_path = specs_dir() / "full_shift.json";
  cfg.out_dir = fresh_dir("refuse");
  CHECK_THROWS_AS(run_usc_scan(cfg), PreconditionError);
}

TEST_CASE("cli exit codes follow the contract") {
  const std::string out = (fs::temp_directory_path() / "melab_cli_out").string();
  // 0: passing run (default --len keeps the tail excess under the tolerance).
  CHECK(run_cli("usc_scan --spec " + (specs_dir() / "golden_mean.json").string() +
                " --out " + out + " --families 4") == 0);
  // 3: precondition refusal (infinite-entropy spec).
  CHECK(run_cli("usc_scan --spec " + (specs_dir() / "full_shift.json").string() +
                " --out " + out) == 3);
  // 1: parse / IO errors.
  CHECK(run_cli("usc_scan --spec /nonexistent.json --out " + out) == 1);
  // Invalid h: refused.
  CHECK(run_cli("counterexample --spec " + (specs_dir() / "full_shift.json").string() +
                " --out " + out + " --h -1 --ns 100,1000,10000") == 3);
}

TEST_CASE("thread cap respects the environment") {
  CHECK(thread_cap() >= 1);
  std::vector<int> hits(64, 0);
  parallel_for(64, [&](int i) { hits[static_cast<std::size_t>(i)] = i + 1; });
  for (int i = 0; i < 64; ++i) CHECK(hits[static_cast<std::size_t>(i)] == i + 1);
}
