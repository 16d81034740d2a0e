#ifndef MELAB_EXPERIMENTS_HPP
#define MELAB_EXPERIMENTS_HPP

#include <filesystem>

#include "melab/io.hpp"

namespace melab {

// Exit-code contract shared by the experiments and the CLI.
enum class ExitCode : int {
  ok = 0,
  io_error = 1,
  assertion_failed = 2,
  refused = 3,
};

struct ExperimentConfig {
  std::string experiment;  // counterexample | usc_scan | entropy_compare | mme_search | flow_usc
  std::filesystem::path spec_path;   // empty: built-in corpus (entropy_compare only)
  std::filesystem::path out_dir;
  std::filesystem::path roof_path;   // optional (flow_usc)
  double h = 0.6931471805599453;     // counterexample / flow transfer parameter
  std::vector<long> ns = {100, 1000, 10000, 100000, 1000000};
  int families = 100;
  int length = 60;                   // family sequence length
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int depth = 3;
};

struct ExperimentResult {
  ExitCode code = ExitCode::ok;
  std::string verdict;  // pass | fail | refused
  std::string message;
  std::vector<std::filesystem::path> artifacts;
};

ExperimentResult run_counterexample(const ExperimentConfig& cfg);
ExperimentResult run_usc_scan(const ExperimentConfig& cfg);
ExperimentResult run_entropy_compare(const ExperimentConfig& cfg);
ExperimentResult run_mme_search(const ExperimentConfig& cfg);
ExperimentResult run_flow_usc(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Worker cap: MELAB_THREADS when set, hardware concurrency otherwise.
int thread_cap();

// Runs f(0..n-1) on up to thread_cap() workers; any exception is rethrown on
// the caller. Results must be written into caller-owned slots by index so
// that output order never depends on scheduling.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace melab

#endif  // MELAB_EXPERIMENTS_HPP
