#ifndef MELAB_SHIFT_HPP
#define MELAB_SHIFT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "melab/errors.hpp"

namespace melab {

using BigInt = boost::multiprecision::cpp_int;

// An admissible (or to-be-checked) finite word. `offset` is the index of the
// first symbol for two-sided cylinders [r1..rn]_l; measure computations are
// offset-independent by shift invariance.
struct Word {
  std::vector<int> symbols;
  long offset = 0;

  Word() = default;
  Word(std::vector<int> s, long l = 0) : symbols(std::move(s)), offset(l) {}
  std::size_t size() const { return symbols.size(); }
  bool operator==(const Word& o) const { return symbols == o.symbols; }
  bool operator<(const Word& o) const { return symbols < o.symbols; }
};

std::string to_string(const Word& w);

// A finite directed graph on vertices 0..size()-1, the working view of a
// shift presentation at a fixed truncation depth. Complete graphs (every
// transition allowed) may stay implicit so that very large alphabets never
// materialize an adjacency structure.
class Truncation {
 public:
  static std::shared_ptr<const Truncation> make(int vertex_count,
                                                std::vector<std::vector<int>> adjacency);
  static std::shared_ptr<const Truncation> make_complete(int vertex_count);

  int size() const { return n_; }
  bool complete() const { return complete_; }
  bool materialized() const { return complete_ ? !adj_.empty() : true; }

  bool edge(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    if (complete_) return true;
    const auto& row = adj_[static_cast<std::size_t>(i)];
    return std::binary_search(row.begin(), row.end(), j);
  }

  // Successors of i in increasing order. Requires a materialized adjacency.
  const std::vector<int>& neighbors(int i) const;

  // Visits successors of i in increasing order until f returns false.
  template <class F>
  void for_neighbors(int i, F&& f) const {
    check_vertex(i);
    if (complete_ && adj_.empty()) {
      for (int j = 0; j < n_; ++j)
        if (!f(j)) return;
      return;
    }
    for (int j : adj_[static_cast<std::size_t>(i)])
      if (!f(j)) return;
  }

  int out_degree(int i) const {
    check_vertex(i);
    if (complete_ && adj_.empty()) return n_;
    return static_cast<int>(adj_[static_cast<std::size_t>(i)].size());
  }

  // Strongly connected components, each sorted, in a deterministic order.
  // Computed once; safe to call concurrently.
  const std::vector<std::vector<int>>& scc() const;

  bool structurally_equal(const Truncation& o) const;

  void check_vertex(int v) const {
    if (v < 0 || v >= n_)
      throw PreconditionError("vertex " + std::to_string(v) +
                              " outside truncation of size " + std::to_string(n_));
  }

 private:
  Truncation(int n, bool complete, std::vector<std::vector<int>> adj);

  void compute_scc() const;

  int n_ = 0;
  bool complete_ = false;
  std::vector<std::vector<int>> adj_;  // sorted rows; empty for large complete graphs
  mutable std::vector<std::vector<int>> scc_;
  mutable std::once_flag scc_once_;
};

using TruncationPtr = std::shared_ptr<const Truncation>;

enum class SpecKind { finite_graph, truncated_countable, loop_counts };

// A finite presentation of a countable Markov shift: an explicit finite
// graph, an edge rule on the nonnegative integers evaluated on exhausting
// truncations {0..k}, or a loop-count sequence realizing a loop graph.
class ShiftSpec {
 public:
  using EdgeRule = std::function<bool(int, int)>;

  static ShiftSpec finite_graph(int vertex_count,
                                const std::vector<std::pair<int, int>>& edges);
  // `rule_name` identifies the rule for serialization; "full" is the complete
  // graph on the countable alphabet (every transition allowed).
  static ShiftSpec countable(std::string rule_name, EdgeRule rule, int cutoff,
                             bool infinite_entropy_hint);
  static ShiftSpec full_shift_rule(int cutoff);
  // counts[i] = number of simple loops of length i+1 through the base vertex.
  static ShiftSpec loop_counts(std::vector<std::uint64_t> counts);

  SpecKind kind() const { return kind_; }
  const std::string& rule_name() const { return rule_name_; }
  int cutoff() const { return cutoff_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // The finite subgraph at exhaustion depth k. Finite graphs have a constant
  // exhaustion; countable rules keep vertices 0..min(k,cutoff); loop specs
  // keep the loops of length <= k of the canonical loop graph.
  TruncationPtr truncate(int k) const;
  // Truncation at the declared cutoff (the whole graph when finite).
  TruncationPtr full_truncation() const;

  // False when the presentation is known (or declared) to have infinite
  // entropy: the "full" rule, or loop counts exceeding the growth cap.
  bool finite_entropy_flag() const;

 private:
  ShiftSpec() = default;

  SpecKind kind_ = SpecKind::finite_graph;
  int vertex_count_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::string rule_name_;
  EdgeRule rule_;
  int cutoff_ = 0;
  bool infinite_hint_ = false;
  std::vector<std::uint64_t> counts_;
  mutable TruncationPtr cached_full_;
};

// Realizes a loop-count prefix as the canonical loop graph: base vertex 0,
// loops ordered by (length, index), each loop of length m contributing a
// chain of m-1 fresh vertices numbered consecutively. Requires counts[0]<=1
// since parallel self-edges cannot be encoded in a 0/1 adjacency.
TruncationPtr realize_loop_graph(std::span<const std::uint64_t> counts_by_length);

bool is_admissible(const Truncation& t, const Word& w);
inline bool is_admissible(const ShiftSpec& spec, const Word& w) {
  return is_admissible(*spec.full_truncation(), w);
}

// Number of closed paths of length n based at a: (A^n)_{aa}, exact.
BigInt loops_at(const Truncation& t, int a, int n);
inline BigInt loops_at(const ShiftSpec& spec, int a, int n) {
  return loops_at(*spec.full_truncation(), a, n);
}
// Z_1..Z_{n_max} in one sweep.
std::vector<BigInt> loops_at_sequence(const Truncation& t, int a, int n_max);

// All first-return words a x1..xn a with xi != a; level n counts interior
// length, level 0 is the direct edge a->a. Throws when more than `budget`
// words would be produced.
std::vector<Word> first_return_words(const Truncation& t, int a, int n,
                                     std::size_t budget = 1'000'000);
// |C_n| for n = 0..n_max via powers of the a-deleted adjacency matrix; exact
// and independent of word enumeration.
std::vector<BigInt> first_return_counts(const Truncation& t, int a, int n_max);
// Loop counts by length 1..n_max recovered from Z_n by inverting the renewal
// recursion Z_n = sum_m c_m Z_{n-m}; exact integer arithmetic.
std::vector<BigInt> loop_counts_via_renewal(const Truncation& t, int a, int n_max);

bool is_transitive(const Truncation& t);
inline bool is_transitive(const ShiftSpec& spec, int k) {
  return is_transitive(*spec.truncate(k));
}

}  // namespace melab

#endif  // MELAB_SHIFT_HPP
