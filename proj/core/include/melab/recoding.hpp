#ifndef MELAB_RECODING_HPP
#define MELAB_RECODING_HPP

#include <map>

#include "melab/measure.hpp"
#include "melab/shift.hpp"

namespace melab {

struct LoopLabel {
  int level = 0;  // interior length of the first-return word
  int index = 0;  // position in lexicographic order within the level
};

// The first-return recoding of a shift at a vertex: level-n first-return
// cylinders of the source in bijection with loops of length n+1 of a
// canonical loop graph (base vertex 0, loops ordered by (length, index),
// fresh chain vertices numbered consecutively). Counts are exact for all
// levels up to `horizon`; explicit word labels stop at `labeled_horizon`,
// bounded by the word budget. Nothing is renormalized silently: callers see
// both horizons.
class LoopSystem {
 public:
  int source_vertex = 0;
  int horizon = 0;
  int labeled_horizon = -1;
  std::vector<BigInt> counts;               // counts[n] = |C_n|, n = 0..horizon
  std::vector<std::vector<Word>> labels;    // [n][i], n = 0..labeled_horizon
  TruncationPtr loop_graph;                 // canonical graph over labeled levels

  // Loop counts by loop length m = 1..labeled_horizon+1 (uint64, labeled only).
  std::vector<std::uint64_t> labeled_counts_by_length() const;
  // The loop spec document equivalent of the labeled part.
  ShiftSpec loop_spec() const;

  // Canonical interior chain of the (level, index) loop: `level` fresh ids.
  std::vector<int> interior(int level, int index) const;
  // Label of a source first-return interior (the word without surrounding a).
  LoopLabel label_of_interior(const std::vector<int>& interior) const;
  // Label of a loop-graph interior chain, identified by its first fresh id.
  LoopLabel label_of_chain(const std::vector<int>& chain) const;

  friend LoopSystem build_loop_system(const ShiftSpec& spec, int a, int n_max,
                                      std::size_t word_budget);

 private:
  std::map<std::vector<int>, LoopLabel> by_interior_;
  std::vector<std::vector<int>> chain_start_;  // [level][index] = first fresh id
  std::map<int, LoopLabel> by_first_fresh_;
};

LoopSystem build_loop_system(const ShiftSpec& spec, int a, int n_max,
                             std::size_t word_budget = 200'000);

// Recodes a source word a x1 a x2 a ... a (each block a-free, labeled) into
// the corresponding loop-graph word; length preserving, admissible in the
// loop graph. decode_word inverts it.
Word recode_word(const LoopSystem& ls, const Word& w);
Word decode_word(const LoopSystem& ls, const Word& w);

// First-return distribution of an ergodic measure at a vertex: probability
// of each return level (and word, as far as the word budget reaches),
// conditional on [a]. Mass escaping past n_max is reported as `deficit`.
struct ReturnDistribution {
  int vertex = 0;
  int n_max = 0;
  double base_mass = 0.0;                 // mu([a])
  std::vector<double> level_prob;         // size n_max+1
  int words_horizon = -1;
  std::vector<std::vector<std::pair<Word, double>>> words;
  double total = 0.0;
  double deficit = 0.0;
  double truncated_mean_return = 0.0;     // sum (n+1) level_prob[n]
};

ReturnDistribution induced_return_distribution(const MarkovMeasure& mu, int a, int n_max,
                                               std::size_t word_budget = 200'000);

}  // namespace melab

#endif  // MELAB_RECODING_HPP
