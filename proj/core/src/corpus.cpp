#include "melab/corpus.hpp"

#include <algorithm>

namespace melab {

ShiftSpec golden_mean_spec() {
  return ShiftSpec::finite_graph(2, {{0, 0}, {0, 1}, {1, 0}});
}

ShiftSpec full_graph_spec(int k) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) edges.emplace_back(i, j);
  return ShiftSpec::finite_graph(k, edges);
}

int highest_degree_vertex(const Truncation& t) {
  int best = 0;
  int best_deg = -1;
  std::vector<int> in_deg(static_cast<std::size_t>(t.size()), 0);
  for (int i = 0; i < t.size(); ++i)
    for (int j : t.neighbors(i)) ++in_deg[static_cast<std::size_t>(j)];
  for (int v = 0; v < t.size(); ++v) {
    const int deg = t.out_degree(v) + in_deg[static_cast<std::size_t>(v)];
    if (deg > best_deg) {
      best_deg = deg;
      best = v;
    }
  }
  return best;
}

namespace {

NamedGraph named(std::string name, ShiftSpec spec) {
  const int marked = highest_degree_vertex(*spec.full_truncation());
  return NamedGraph{std::move(name), std::move(spec), marked};
}

// Deterministic strongly connected digraph: a Hamiltonian cycle plus seeded
// extra edges.
ShiftSpec seeded_transitive_graph(int vertices, std::uint64_t seed, int extra_edges) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < vertices; ++v) edges.emplace_back(v, (v + 1) % vertices);
  std::uniform_int_distribution<int> pick(0, vertices - 1);
  int added = 0;
  while (added < extra_edges) {
    const int i = pick(rng);
    const int j = pick(rng);
    if (std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end())
      continue;
    edges.emplace_back(i, j);
    ++added;
  }
  return ShiftSpec::finite_graph(vertices, edges);
}

}  // namespace

std::vector<NamedGraph> standard_graph_corpus() {
  std::vector<NamedGraph> corpus;
  corpus.push_back(named("full2", full_graph_spec(2)));
  corpus.push_back(named("full3", full_graph_spec(3)));
  corpus.push_back(named("full4", full_graph_spec(4)));
  corpus.push_back(named("golden_mean", golden_mean_spec()));
  // Self loop feeding a 3-cycle.
  corpus.push_back(named("loop_plus_3cycle",
                         ShiftSpec::finite_graph(3, {{0, 0}, {0, 1}, {1, 2}, {2, 0}})));
  // Two loops of lengths 2 and 3 sharing vertex 0 (aperiodic, entropy < log 2).
  corpus.push_back(named("petals_2_3",
                         ShiftSpec::finite_graph(4, {{0, 1}, {1, 0}, {0, 2}, {2, 3}, {3, 0}})));
  // De Bruijn graph of 2-words over two symbols.
  corpus.push_back(named("de_bruijn_2_2",
                         ShiftSpec::finite_graph(4, {{0, 0}, {0, 1}, {1, 2}, {1, 3},
                                                     {2, 0}, {2, 1}, {3, 2}, {3, 3}})));
  // Golden-mean pattern stretched over three vertices.
  corpus.push_back(named("fib_chain_3",
                         ShiftSpec::finite_graph(3, {{0, 0}, {0, 1}, {1, 2}, {2, 0}, {2, 1}})));
  // Directed 4-cycle with two chords (period 1, moderate entropy).
  corpus.push_back(named("cycle4_chords",
                         ShiftSpec::finite_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                     {0, 2}, {2, 0}})));
  corpus.push_back(named("seeded_5", seeded_transitive_graph(5, 0x5eed0001ULL, 6)));
  corpus.push_back(named("seeded_6", seeded_transitive_graph(6, 0x5eed0002ULL, 8)));
  corpus.push_back(named("seeded_8", seeded_transitive_graph(8, 0x5eed0003ULL, 12)));
  for (const auto& g : corpus) {
    if (!is_transitive(*g.spec.full_truncation()))
      throw Error("corpus graph " + g.name + " is not strongly connected");
  }
  return corpus;
}

Eigen::MatrixXd random_stochastic_matrix(const Truncation& t, std::mt19937_64& rng) {
  const int n = t.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  std::exponential_distribution<double> expo(1.0);
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j : t.neighbors(i)) {
      const double w = expo(rng) + 1e-3;  // keep rows away from degenerate corners
      P(i, j) = w;
      total += w;
    }
    P.row(i) /= total;
  }
  return P;
}

MarkovMeasure random_markov_measure(TruncationPtr t, std::mt19937_64& rng) {
  const Eigen::MatrixXd P = random_stochastic_matrix(*t, rng);
  std::vector<int> support(static_cast<std::size_t>(t->size()));
  for (int i = 0; i < t->size(); ++i) support[static_cast<std::size_t>(i)] = i;
  return MarkovMeasure::markov(std::move(t), std::move(support), P);
}

MeasureFamily make_convergent_family(TruncationPtr t, std::uint64_t seed, int length) {
  if (length < 3) throw PreconditionError("family length must be at least 3");
  if (!is_transitive(*t))
    throw PreconditionError("family generator requires a transitive truncation");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd far = random_stochastic_matrix(*t, rng);
  const Eigen::MatrixXd limit = random_stochastic_matrix(*t, rng);
  std::vector<int> support(static_cast<std::size_t>(t->size()));
  for (int i = 0; i < t->size(); ++i) support[static_cast<std::size_t>(i)] = i;
  MeasureFamily fam{
      {}, MarkovMeasure::markov(t, support, limit)};
  fam.seq.reserve(static_cast<std::size_t>(length));
  for (int i = 1; i <= length; ++i) {
    const double s = std::ldexp(1.0, -i);  // 1 - t_i
    Eigen::MatrixXd P = s * far + (1.0 - s) * limit;
    for (Eigen::Index r = 0; r < P.rows(); ++r) P.row(r) /= P.row(r).sum();
    fam.seq.push_back(MarkovMeasure::markov(t, support, std::move(P)));
  }
  return fam;
}

}  // namespace melab
