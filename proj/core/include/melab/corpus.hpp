#ifndef MELAB_CORPUS_HPP
#define MELAB_CORPUS_HPP

#include <random>

#include "melab/measure.hpp"

namespace melab {

// Catalog of small transitive graphs used by the entropy cross-checks, the
// scan experiments and the test suites.
struct NamedGraph {
  std::string name;
  ShiftSpec spec;
  int marked_vertex = 0;  // highest-degree vertex, ties to the smallest id
};

ShiftSpec golden_mean_spec();
ShiftSpec full_graph_spec(int k);

// At least ten transitive graphs on at most eight vertices.
std::vector<NamedGraph> standard_graph_corpus();

int highest_degree_vertex(const Truncation& t);

// Row-stochastic matrix supported exactly on the allowed edges, rows drawn
// from a flat Dirichlet via normalized exponentials.
Eigen::MatrixXd random_stochastic_matrix(const Truncation& t, std::mt19937_64& rng);

MarkovMeasure random_markov_measure(TruncationPtr t, std::mt19937_64& rng);

// A weak*-convergent family of ergodic Markov measures on a fixed transitive
// graph: measures of P_t = (1-t) P_far + t P_limit along t = 1 - 2^{-i},
// i = 1..length. Convergence to the limit measure holds by construction.
struct MeasureFamily {
  std::vector<MarkovMeasure> seq;
  MarkovMeasure limit;
};
MeasureFamily make_convergent_family(TruncationPtr t, std::uint64_t seed, int length);

}  // namespace melab

#endif  // MELAB_CORPUS_HPP
