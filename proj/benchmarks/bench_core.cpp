#include <benchmark/benchmark.h>

#include <random>

#include "melab/corpus.hpp"
#include "melab/entropy.hpp"
#include "melab/recoding.hpp"
#include "melab/weakstar.hpp"

using namespace melab;

static void BM_SpectralRadius(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = unif(rng) < 0.3 ? 0.0 : unif(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_radius(A));
  }
}
BENCHMARK(BM_SpectralRadius)->RangeMultiplier(2)->Range(4, 64);

static void BM_LoopCountSequence(benchmark::State& state) {
  const auto spec = full_graph_spec(8);
  const TruncationPtr t = spec.full_truncation();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loops_at_sequence(*t, 0, n));
  }
}
BENCHMARK(BM_LoopCountSequence)->Arg(60)->Arg(200);

static void BM_RenewalEntropy(benchmark::State& state) {
  const auto spec = full_graph_spec(8);
  const TruncationPtr t = spec.full_truncation();
  const auto counts = loop_counts_via_renewal(*t, 0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loop_system_entropy(counts, 1e-12));
  }
}
BENCHMARK(BM_RenewalEntropy)->Arg(60)->Arg(200);

static void BM_CylinderMetric(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const TruncationPtr t = full_graph_spec(6).full_truncation();
  const auto mu = random_markov_measure(t, rng);
  const auto nu = random_markov_measure(t, rng);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cylinder_metric(mu, nu, depth));
  }
}
BENCHMARK(BM_CylinderMetric)->DenseRange(1, 5);

static void BM_SupDeviation(benchmark::State& state) {
  std::mt19937_64 rng(9);
  const TruncationPtr t = full_graph_spec(6).full_truncation();
  const auto mu = random_markov_measure(t, rng);
  const auto nu = random_markov_measure(t, rng);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sup_cylinder_deviations(mu, nu, depth));
  }
}
BENCHMARK(BM_SupDeviation)->DenseRange(1, 5);

static void BM_PartitionEntropy(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const TruncationPtr t = full_graph_spec(4).full_truncation();
  const auto mu = random_markov_measure(t, rng);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_entropy(mu, depth));
  }
}
BENCHMARK(BM_PartitionEntropy)->DenseRange(2, 8, 2);

static void BM_RecodeRoundTrip(benchmark::State& state) {
  const LoopSystem ls = build_loop_system(full_graph_spec(3), 0, 8);
  std::mt19937_64 rng(13);
  std::vector<int> symbols{0};
  for (int b = 0; b < 6; ++b) {
    const int level = static_cast<int>(rng() % 5);
    const auto& lvl = ls.labels[static_cast<std::size_t>(level)];
    const auto& w = lvl[rng() % lvl.size()].symbols;
    symbols.insert(symbols.end(), w.begin() + 1, w.end());
  }
  const Word word{symbols};
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_word(ls, recode_word(ls, word)));
  }
}
BENCHMARK(BM_RecodeRoundTrip);

BENCHMARK_MAIN();
