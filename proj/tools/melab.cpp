// melab: experiments on countable Markov shifts, their invariant measures and
// suspension flows. Each subcommand writes CSV artifacts plus a JSON summary
// into --out and exits 0 (pass), 2 (assertion failed), 3 (refused) or 1 (I/O
// or parse error).

#include <CLI11.hpp>
#include <iostream>

#include "melab/experiments.hpp"

namespace {

std::vector<long> parse_ns(const std::string& csv) {
  std::vector<long> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stol(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measure-entropy lab for countable Markov shifts"};
  app.set_help_flag("--help", "print help");  // frees -h / --h for the entropy target
  app.require_subcommand(1);

  melab::ExperimentConfig cfg;
  std::string ns_csv = "100,1000,10000,100000,1000000";

  auto add_common = [&](CLI::App* sub, bool spec_required) {
    sub->set_help_flag("--help", "print help");
    auto* spec_opt = sub->add_option("--spec", cfg.spec_path, "shift spec document");
    if (spec_required) spec_opt->required();
    sub->add_option("--out", cfg.out_dir, "output directory")->required();
    sub->add_option("--seed", cfg.seed, "experiment seed");
    sub->add_option("--tol", cfg.tol, "tolerance");
    sub->add_option("--depth", cfg.depth, "cylinder depth for weak* checks");
  };

  auto* counterexample = app.add_subcommand(
      "counterexample", "Bernoulli family with entropy h collapsing onto a Dirac mass");
  add_common(counterexample, true);
  counterexample->add_option("--h", cfg.h, "entropy target (nats)");
  counterexample->add_option("--ns", ns_csv, "comma-separated alphabet sizes");

  auto* usc_scan = app.add_subcommand(
      "usc_scan", "seeded convergent ergodic families, upper semi-continuity verdicts");
  add_common(usc_scan, true);
  usc_scan->add_option("--families", cfg.families, "number of seeded families");
  usc_scan->add_option("--len", cfg.length, "family sequence length");

  auto* entropy_compare = app.add_subcommand(
      "entropy_compare", "periodic-orbit vs spectral vs loop-renewal entropy");
  add_common(entropy_compare, false);

  auto* mme_search = app.add_subcommand(
      "mme_search", "maximal-entropy limits of convergent sequences, or drift reports");
  add_common(mme_search, true);
  mme_search->add_option("--len", cfg.length, "sequence length");

  auto* flow_usc = app.add_subcommand(
      "flow_usc", "suspension-flow upper semi-continuity over a roof function");
  add_common(flow_usc, true);
  flow_usc->add_option("--roof", cfg.roof_path, "roof document (default: unit roof)");
  flow_usc->add_option("--families", cfg.families, "number of seeded families");
  flow_usc->add_option("--len", cfg.length, "family sequence length");
  flow_usc->add_option("--h", cfg.h, "entropy target for the transfer mode");
  flow_usc->add_option("--ns", ns_csv, "alphabet sizes for the transfer mode");

  CLI11_PARSE(app, argc, argv);

  cfg.experiment = app.get_subcommands().front()->get_name();
  try {
    cfg.ns = parse_ns(ns_csv);
  } catch (const std::exception&) {
    std::cerr << "melab: cannot parse --ns \"" << ns_csv << "\"\n";
    return static_cast<int>(melab::ExitCode::io_error);
  }

  try {
    const melab::ExperimentResult res = melab::run_experiment(cfg);
    std::cout << cfg.experiment << ": " << res.verdict << " (" << res.message << ")\n";
    for (const auto& a : res.artifacts) std::cout << "  " << a.string() << "\n";
    return static_cast<int>(res.code);
  } catch (const melab::ParseError& e) {
    std::cerr << "melab: parse error: " << e.what() << "\n";
    return static_cast<int>(melab::ExitCode::io_error);
  } catch (const melab::PreconditionError& e) {
    std::cerr << "melab: refused: " << e.what() << "\n";
    return static_cast<int>(melab::ExitCode::refused);
  } catch (const melab::NumericalError& e) {
    std::cerr << "melab: numerical failure: " << e.what() << "\n";
    return static_cast<int>(melab::ExitCode::assertion_failed);
  } catch (const std::exception& e) {
    std::cerr << "melab: " << e.what() << "\n";
    return static_cast<int>(melab::ExitCode::io_error);
  }
}
