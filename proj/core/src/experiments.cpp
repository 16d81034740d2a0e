#include "melab/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "melab/corpus.hpp"
#include "melab/entropy.hpp"
#include "melab/recoding.hpp"

namespace melab {

namespace {

using nlohmann::json;

// Depth-3 sup deviation of the counterexample family stays below this from
// n = 10^5 on; the certification threshold for the transfer experiments.
constexpr double kCounterexampleWsTol = 0.2;

json params_json(const ExperimentConfig& cfg) {
  json p;
  p["spec"] = cfg.spec_path.string();
  p["h"] = cfg.h;
  p["ns"] = cfg.ns;
  p["families"] = cfg.families;
  p["length"] = cfg.length;
  p["seed"] = cfg.seed;
  p["tol"] = cfg.tol;
  p["depth"] = cfg.depth;
  if (!cfg.roof_path.empty()) p["roof"] = cfg.roof_path.string();
  return p;
}

ExperimentResult finish(const ExperimentConfig& cfg, ExperimentResult res) {
  json summary;
  summary["experiment"] = cfg.experiment.empty() ? "?" : cfg.experiment;
  summary["params"] = params_json(cfg);
  summary["verdict"] = res.verdict;
  summary["message"] = res.message;
  json artifacts = json::array();
  for (const auto& a : res.artifacts) artifacts.push_back(a.filename().string());
  summary["artifacts"] = std::move(artifacts);
  const auto file = cfg.out_dir / (cfg.experiment + "_summary.json");
  write_text_atomic(file, summary.dump(2) + "\n");
  res.artifacts.push_back(file);
  return res;
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw Error("output directory not set");
  std::filesystem::create_directories(cfg.out_dir);
}

ShiftSpec load_spec_or_refuse(const ExperimentConfig& cfg) {
  if (cfg.spec_path.empty()) throw PreconditionError("this experiment needs --spec");
  return load_shift_spec(cfg.spec_path);
}

}  // namespace

int thread_cap() {
  if (const char* env = std::getenv("MELAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& f) {
  const int workers = std::min(n, thread_cap());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentResult run_counterexample(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  const ShiftSpec spec = load_spec_or_refuse(cfg);
  if (spec.kind() != SpecKind::truncated_countable || spec.rule_name() != "full")
    throw PreconditionError("counterexample experiment runs on the full countable "
                            "shift ({\"type\":\"truncated\",\"rule\":\"full\"})");
  if (!(cfg.h > 0.0)) throw PreconditionError("h must be positive");
  CsvWriter csv({"n", "a_n", "H1", "h_target", "deviation_to_delta0"});
  ExperimentResult res;
  const auto csv_file = cfg.out_dir / "counterexample.csv";
  if (cfg.ns.empty()) {
    csv.write(csv_file);
    res.artifacts.push_back(csv_file);
    res.verdict = "pass";
    res.message = "empty parameter grid";
    return finish(cfg, res);
  }
  long max_n = 0;
  for (long n : cfg.ns) max_n = std::max(max_n, n);
  if (static_cast<long>(spec.cutoff()) < max_n)
    throw PreconditionError("spec cutoff " + std::to_string(spec.cutoff()) +
                            " below the largest requested n");
  const std::size_t budget = static_cast<std::size_t>(max_n) + 2;
  std::vector<MarkovMeasure> seq;
  std::vector<double> h1s;
  seq.reserve(cfg.ns.size());
  for (long n : cfg.ns)
    seq.push_back(bernoulli_counterexample_measure(cfg.h, n, max_n));
  const MarkovMeasure delta0 =
      MarkovMeasure::dirac_periodic(seq.front().ambient(), {0});
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
    const long n = cfg.ns[i];
    const double a = cfg.h / std::log(static_cast<double>(n));
    const double H1 =
        partition_entropy(seq[i], 1, std::max<std::size_t>(budget, 1'000'000)).H[0];
    const double dev = cylinder_metric(seq[i], delta0, cfg.depth);
    h1s.push_back(H1);
    csv.add_row({std::to_string(n), format_double(a), format_double(H1),
                 format_double(cfg.h), format_double(dev)});
  }
  csv.write(csv_file);
  res.artifacts.push_back(csv_file);
  // The entropy of the family stays above its limit h while the measures
  // collapse onto the Dirac mass at the fixed point.
  bool ok = true;
  std::string why;
  for (std::size_t i = 0; i < h1s.size(); ++i) {
    if (h1s[i] <= cfg.h) { ok = false; why = "H1 not above h"; }
    if (i > 0 && h1s[i] >= h1s[i - 1]) { ok = false; why = "H1 not decreasing"; }
  }
  if (cfg.ns.size() >= 3) {
    const auto ws = check_weakstar_limit(seq, delta0, cfg.depth, kCounterexampleWsTol);
    const auto rep_file = cfg.out_dir / "counterexample_convergence.csv";
    std::vector<double> entropies;
    for (const auto& m : seq) entropies.push_back(ks_entropy(m));
    write_text_atomic(rep_file, convergence_report_csv(ws, entropies));
    res.artifacts.push_back(rep_file);
    if (ws.verdict != WsVerdict::converges) { ok = false; why = "no weak* certificate"; }
    const auto usc = usc_check(seq, delta0, cfg.tol, cfg.depth, kCounterexampleWsTol);
    write_text_atomic(cfg.out_dir / "counterexample_usc.json", usc_report_json(usc) + "\n");
    res.artifacts.push_back(cfg.out_dir / "counterexample_usc.json");
    if (usc.verdict != UscVerdict::usc_violated) {
      ok = false;
      why = "entropy map unexpectedly upper semi-continuous";
    }
  }
  res.verdict = ok ? "pass" : "fail";
  res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
  res.message = ok ? "entropy drop at the Dirac limit reproduced" : why;
  return finish(cfg, res);
}

ExperimentResult run_usc_scan(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  const ShiftSpec spec = load_spec_or_refuse(cfg);
  if (!spec.finite_entropy_flag())
    throw PreconditionError("usc scan refuses specs flagged infinite-entropy: the "
                            "finite-entropy hypothesis fails");
  TruncationPtr t = spec.full_truncation();
  if (!is_transitive(*t))
    throw PreconditionError("usc scan requires a transitive truncation");
  struct Row {
    UscVerdict verdict;
    double tail_max = 0, limit = 0, final_dev = 0, final_metric = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.families));
  parallel_for(cfg.families, [&](int k) {
    const MeasureFamily fam =
        make_convergent_family(t, cfg.seed + static_cast<std::uint64_t>(k), cfg.length);
    const UscReport rep = usc_check(fam.seq, fam.limit, cfg.tol, cfg.depth, 1e-6);
    rows[static_cast<std::size_t>(k)] =
        Row{rep.verdict, rep.tail_max_entropy, rep.limit_entropy,
            rep.convergence.sup_dev.back(), rep.convergence.metric.back()};
  });
  CsvWriter csv({"family", "seed", "verdict", "tail_max_entropy", "limit_entropy",
                 "final_deviation", "final_metric"});
  int violations = 0, inapplicable = 0;
  for (int k = 0; k < cfg.families; ++k) {
    const Row& r = rows[static_cast<std::size_t>(k)];
    if (r.verdict == UscVerdict::usc_violated) ++violations;
    if (r.verdict == UscVerdict::not_applicable) ++inapplicable;
    csv.add_row({std::to_string(k), std::to_string(cfg.seed + static_cast<std::uint64_t>(k)),
                 to_string(r.verdict), format_double(r.tail_max), format_double(r.limit),
                 format_double(r.final_dev), format_double(r.final_metric)});
  }
  const auto csv_file = cfg.out_dir / "usc_scan.csv";
  csv.write(csv_file);
  ExperimentResult res;
  res.artifacts.push_back(csv_file);
  const bool ok = violations == 0 && inapplicable == 0;
  res.verdict = ok ? "pass" : "fail";
  res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
  res.message = std::to_string(violations) + " usc violations, " +
                std::to_string(inapplicable) + " failed certificates in " +
                std::to_string(cfg.families) + " families";
  return finish(cfg, res);
}

ExperimentResult run_entropy_compare(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  std::vector<NamedGraph> corpus;
  if (cfg.spec_path.empty()) {
    corpus = standard_graph_corpus();
  } else {
    ShiftSpec spec = load_shift_spec(cfg.spec_path);
    if (!spec.finite_entropy_flag())
      throw PreconditionError("entropy comparison needs a finite-entropy spec");
    const int marked = highest_degree_vertex(*spec.full_truncation());
    corpus.push_back(NamedGraph{cfg.spec_path.stem().string(), std::move(spec), marked});
  }
  CsvWriter csv({"graph", "vertices", "method", "value", "converged"});
  ExperimentResult res;
  bool ok = true;
  std::string why;
  struct Item {
    EntropyEstimate periodic, spectral, renewal;
    int vertices = 0;
  };
  std::vector<Item> items(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), [&](int gi) {
    const NamedGraph& g = corpus[static_cast<std::size_t>(gi)];
    TruncationPtr t = g.spec.full_truncation();
    Item item;
    item.vertices = t->size();
    item.periodic = gurevich_entropy_periodic(*t, g.marked_vertex, 60);
    item.spectral = gurevich_entropy_truncation(
        g.spec, std::max(2, std::min(t->size(), g.spec.cutoff() + 1)), 1e-9);
    // Renewal horizon sized from the contraction ratio rho(B)/rho(A) of the
    // marked-vertex-deleted subgraph.
    const double rho_a = std::exp(item.spectral.value);
    double ratio = 0.5;
    if (t->size() > 1) {
      std::vector<std::vector<int>> sub(static_cast<std::size_t>(t->size()));
      for (int i = 0; i < t->size(); ++i) {
        if (i == g.marked_vertex) continue;
        for (int j : t->neighbors(i))
          if (j != g.marked_vertex) sub[static_cast<std::size_t>(i)].push_back(j);
      }
      const double rho_b = spectral_radius(*Truncation::make(t->size(), std::move(sub)));
      if (rho_b > 0.0) ratio = std::min(0.98, rho_b / rho_a);
    }
    const int horizon =
        std::clamp(static_cast<int>(std::ceil(std::log(1e-10) / std::log(ratio))), 60, 400);
    item.renewal =
        loop_system_entropy(loop_counts_via_renewal(*t, g.marked_vertex, horizon), 1e-12);
    items[static_cast<std::size_t>(gi)] = std::move(item);
  });
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const NamedGraph& g = corpus[gi];
    const Item& item = items[gi];
    for (const auto* e : {&item.periodic, &item.spectral, &item.renewal}) {
      csv.add_row({g.name, std::to_string(item.vertices), to_string(e->method),
                   format_double(e->value), e->converged ? "1" : "0"});
      const auto diag_file =
          cfg.out_dir / (g.name + "_" + to_string(e->method) + "_diagnostics.csv");
      write_text_atomic(diag_file, entropy_diagnostics_csv(*e));
      res.artifacts.push_back(diag_file);
    }
    if (std::abs(item.periodic.value - item.spectral.value) > 0.05 ||
        std::abs(item.periodic.value - item.renewal.value) > 0.05) {
      ok = false;
      why = "periodic estimate disagrees on " + g.name;
    }
    if (std::abs(item.renewal.value - item.spectral.value) > 1e-6) {
      ok = false;
      why = "renewal vs spectral gap on " + g.name;
    }
  }
  const auto csv_file = cfg.out_dir / "entropy_compare.csv";
  csv.write(csv_file);
  res.artifacts.insert(res.artifacts.begin(), csv_file);
  res.verdict = ok ? "pass" : "fail";
  res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
  res.message = ok ? "all methods agree" : why;
  return finish(cfg, res);
}

ExperimentResult run_mme_search(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  const ShiftSpec spec = load_spec_or_refuse(cfg);
  if (!spec.finite_entropy_flag())
    throw PreconditionError("mme search needs a finite-entropy spec");
  TruncationPtr t = spec.full_truncation();
  if (!is_transitive(*t))
    throw PreconditionError("mme search requires a transitive truncation");
  ExperimentResult res;
  const double h_top = std::log(spectral_radius(*t));
  std::vector<MarkovMeasure> seq;
  MarkovMeasure candidate = parry_measure(t);
  std::string mode;
  if (spec.kind() == SpecKind::loop_counts) {
    // Drift along longer and longer loops: Dirac measures on the canonical
    // loops, ordered by length. Mass escapes the base cylinder.
    mode = "loop_drift";
    const auto& counts = spec.counts();
    int fresh = 1;
    for (std::size_t m = 1; m <= counts.size(); ++m) {
      for (std::uint64_t j = 0; j < counts[m - 1]; ++j) {
        std::vector<int> orbit{0};
        for (std::size_t s = 0; s + 1 < m; ++s) orbit.push_back(fresh + static_cast<int>(s));
        fresh += static_cast<int>(m) - 1;
        seq.push_back(MarkovMeasure::dirac_periodic(t, orbit));
        if (static_cast<int>(seq.size()) >= cfg.length) break;
      }
      if (static_cast<int>(seq.size()) >= cfg.length) break;
    }
    if (seq.size() < 3)
      throw PreconditionError("loop spec too small to build a drift sequence");
  } else {
    mode = "parry_perturbation";
    std::mt19937_64 rng(cfg.seed);
    const Eigen::MatrixXd far = random_stochastic_matrix(*t, rng);
    const Eigen::MatrixXd& limit = candidate.transition_matrix();
    std::vector<int> support(static_cast<std::size_t>(t->size()));
    for (int i = 0; i < t->size(); ++i) support[static_cast<std::size_t>(i)] = i;
    for (int i = 1; i <= cfg.length; ++i) {
      const double s = std::ldexp(1.0, -i);
      Eigen::MatrixXd P = s * far + (1.0 - s) * limit;
      for (Eigen::Index r = 0; r < P.rows(); ++r) P.row(r) /= P.row(r).sum();
      seq.push_back(MarkovMeasure::markov(t, support, std::move(P)));
    }
  }
  const auto ws = check_weakstar_limit(seq, candidate, cfg.depth, 1e-6);
  std::vector<double> entropies;
  for (const auto& m : seq) entropies.push_back(ks_entropy(m));
  const auto csv_file = cfg.out_dir / "mme_search.csv";
  write_text_atomic(csv_file, convergence_report_csv(ws, entropies));
  res.artifacts.push_back(csv_file);
  bool ok = true;
  std::string message;
  if (ws.verdict == WsVerdict::converges) {
    const double gap = std::abs(ks_entropy(candidate) - h_top);
    ok = gap < cfg.tol;
    message = ok ? "limit attains the topological entropy (gap " + format_double(gap) + ")"
                 : "limit misses the topological entropy by " + format_double(gap);
  } else {
    message = std::string("no accumulation point at horizon (") + to_string(ws.verdict) +
              ", " + mode + ")";
  }
  res.verdict = ok ? "pass" : "fail";
  res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
  res.message = message;
  return finish(cfg, res);
}

ExperimentResult run_flow_usc(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  const ShiftSpec spec = load_spec_or_refuse(cfg);
  const RoofFunction roof = cfg.roof_path.empty()
                                ? RoofFunction::constant(1.0, 1)
                                : load_roof(cfg.roof_path);
  ExperimentResult res;
  if (!spec.finite_entropy_flag()) {
    // Transfer mode: the unit-roof suspension inherits the entropy drop of
    // the base counterexample family.
    if (spec.kind() != SpecKind::truncated_countable || spec.rule_name() != "full")
      throw PreconditionError("infinite-entropy flow check runs on the full shift");
    if (!roof.fn().is_constant())
      throw PreconditionError("table roofs are not supported on the full shift");
    if (cfg.ns.size() < 3)
      throw PreconditionError("transfer mode needs at least three n values");
    long max_n = 0;
    for (long n : cfg.ns) max_n = std::max(max_n, n);
    if (static_cast<long>(spec.cutoff()) < max_n)
      throw PreconditionError("spec cutoff below the largest requested n");
    const std::size_t budget = std::max<std::size_t>(static_cast<std::size_t>(max_n) + 2,
                                                     1'000'000);
    std::vector<FlowMeasure> seq;
    for (long n : cfg.ns)
      seq.push_back(lift_measure(bernoulli_counterexample_measure(cfg.h, n, max_n),
                                 roof, budget));
    const FlowMeasure limit = lift_measure(
        MarkovMeasure::dirac_periodic(seq.front().base.ambient(), {0}), roof, budget);
    const FlowUscReport rep =
        flow_usc_check(seq, limit, cfg.tol, cfg.depth, kCounterexampleWsTol);
    CsvWriter csv({"index", "n", "base_deviation", "mean_roof", "flow_entropy"});
    for (std::size_t i = 0; i < seq.size(); ++i)
      csv.add_row({std::to_string(i), std::to_string(cfg.ns[i]),
                   format_double(rep.base_convergence.sup_dev[i]),
                   format_double(rep.mean_roofs[i]),
                   format_double(rep.flow_entropies[i])});
    const auto csv_file = cfg.out_dir / "flow_usc.csv";
    csv.write(csv_file);
    res.artifacts.push_back(csv_file);
    const bool ok = rep.verdict == UscVerdict::usc_violated;
    res.verdict = ok ? "pass" : "fail";
    res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
    res.message = ok ? "flow entropy drop at the Dirac limit reproduced"
                     : "expected a flow usc violation, got " +
                           std::string(to_string(rep.verdict));
    return finish(cfg, res);
  }
  TruncationPtr t = spec.full_truncation();
  if (!is_transitive(*t))
    throw PreconditionError("flow usc scan requires a transitive truncation");
  if (!roof.fn().defined_on(*t))
    throw PreconditionError("roof not defined on every admissible word");
  struct Row {
    UscVerdict verdict;
    double tail_max = 0, limit = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.families));
  parallel_for(cfg.families, [&](int k) {
    const MeasureFamily fam =
        make_convergent_family(t, cfg.seed + static_cast<std::uint64_t>(k), cfg.length);
    std::vector<FlowMeasure> fseq;
    fseq.reserve(fam.seq.size());
    for (const auto& m : fam.seq) fseq.push_back(lift_measure(m, roof));
    const FlowMeasure flimit = lift_measure(fam.limit, roof);
    const FlowUscReport rep = flow_usc_check(fseq, flimit, cfg.tol, cfg.depth, 1e-6);
    rows[static_cast<std::size_t>(k)] =
        Row{rep.verdict, rep.tail_max_entropy, rep.limit_entropy};
  });
  CsvWriter csv({"family", "seed", "verdict", "tail_max_flow_entropy", "limit_flow_entropy"});
  int bad = 0;
  for (int k = 0; k < cfg.families; ++k) {
    const Row& r = rows[static_cast<std::size_t>(k)];
    if (r.verdict != UscVerdict::usc_holds) ++bad;
    csv.add_row({std::to_string(k), std::to_string(cfg.seed + static_cast<std::uint64_t>(k)),
                 to_string(r.verdict), format_double(r.tail_max), format_double(r.limit)});
  }
  const auto csv_file = cfg.out_dir / "flow_usc.csv";
  csv.write(csv_file);
  res.artifacts.push_back(csv_file);
  const bool ok = bad == 0;
  res.verdict = ok ? "pass" : "fail";
  res.code = ok ? ExitCode::ok : ExitCode::assertion_failed;
  res.message = std::to_string(bad) + " families without usc_holds out of " +
                std::to_string(cfg.families);
  return finish(cfg, res);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (cfg.depth < 1) throw PreconditionError("depth must be positive");
  if (cfg.experiment == "counterexample") return run_counterexample(cfg);
  if (cfg.experiment == "usc_scan") return run_usc_scan(cfg);
  if (cfg.experiment == "entropy_compare") return run_entropy_compare(cfg);
  if (cfg.experiment == "mme_search") return run_mme_search(cfg);
  if (cfg.experiment == "flow_usc") return run_flow_usc(cfg);
  throw ParseError("unknown experiment \"" + cfg.experiment + "\"");
}

}  // namespace melab
