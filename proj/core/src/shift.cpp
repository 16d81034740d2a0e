#include "melab/shift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace melab {

namespace {

// Non-complete rule truncations are materialized pairwise; cap the quadratic
// scan. The "full" rule never hits this path.
constexpr int kRuleMaterializeLimit = 4096;
// Complete graphs up to this size get explicit adjacency rows so that graph
// algorithms (SCC, loop counting) can run on them unchanged.
constexpr int kCompleteMaterializeLimit = 1024;
// Growth cap used by the finite-entropy flag: counts with log(c_n)/n beyond
// this cannot have a summable generating function before x = e^{-H_max}.
constexpr double kEntropyCapNats = 50.0;

}  // namespace

std::string to_string(const Word& w) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < w.symbols.size(); ++i) {
    if (i) os << ' ';
    os << w.symbols[i];
  }
  os << "]_" << w.offset;
  return os.str();
}

Truncation::Truncation(int n, bool complete, std::vector<std::vector<int>> adj)
    : n_(n), complete_(complete), adj_(std::move(adj)) {}

std::shared_ptr<const Truncation> Truncation::make(int vertex_count,
                                                   std::vector<std::vector<int>> adjacency) {
  if (vertex_count <= 0) throw PreconditionError("empty graph");
  if (static_cast<int>(adjacency.size()) != vertex_count)
    throw PreconditionError("adjacency size does not match vertex count");
  for (auto& row : adjacency) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (int j : row)
      if (j < 0 || j >= vertex_count)
        throw PreconditionError("edge to undeclared vertex " + std::to_string(j));
  }
  return std::shared_ptr<const Truncation>(
      new Truncation(vertex_count, false, std::move(adjacency)));
}

std::shared_ptr<const Truncation> Truncation::make_complete(int vertex_count) {
  if (vertex_count <= 0) throw PreconditionError("empty graph");
  std::vector<std::vector<int>> adj;
  if (vertex_count <= kCompleteMaterializeLimit) {
    std::vector<int> all(static_cast<std::size_t>(vertex_count));
    for (int j = 0; j < vertex_count; ++j) all[static_cast<std::size_t>(j)] = j;
    adj.assign(static_cast<std::size_t>(vertex_count), all);
  }
  return std::shared_ptr<const Truncation>(
      new Truncation(vertex_count, true, std::move(adj)));
}

const std::vector<int>& Truncation::neighbors(int i) const {
  check_vertex(i);
  if (!materialized())
    throw PreconditionError(
        "truncation too large for explicit adjacency (complete graph on " +
        std::to_string(n_) + " vertices)");
  return adj_[static_cast<std::size_t>(i)];
}

const std::vector<std::vector<int>>& Truncation::scc() const {
  std::call_once(scc_once_, [this]() { compute_scc(); });
  return scc_;
}

// Iterative Tarjan; components reported sorted by smallest vertex.
void Truncation::compute_scc() const {
  if (complete_ && adj_.empty()) {
    std::vector<int> all(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) all[static_cast<std::size_t>(j)] = j;
    scc_.push_back(std::move(all));
    return;
  }
  const int n = n_;
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  int next_index = 0;
  struct Frame {
    int v;
    std::size_t edge_pos;
  };
  std::vector<Frame> frames;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.v;
      if (f.edge_pos == 0) {
        index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = next_index++;
        stack.push_back(v);
        on_stack[static_cast<std::size_t>(v)] = 1;
      }
      const auto& row = adj_[static_cast<std::size_t>(v)];
      bool descended = false;
      while (f.edge_pos < row.size()) {
        const int w = row[f.edge_pos++];
        if (index[static_cast<std::size_t>(w)] == -1) {
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[static_cast<std::size_t>(w)])
          low[static_cast<std::size_t>(v)] =
              std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
      }
      if (descended) continue;
      if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
        std::vector<int> comp;
        for (;;) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        scc_.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) {
        Frame& parent = frames.back();
        low[static_cast<std::size_t>(parent.v)] = std::min(
            low[static_cast<std::size_t>(parent.v)], low[static_cast<std::size_t>(v)]);
      }
    }
  }
  std::sort(scc_.begin(), scc_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

bool Truncation::structurally_equal(const Truncation& o) const {
  if (this == &o) return true;
  if (n_ != o.n_) return false;
  if (complete_ && o.complete_) return true;
  if (!materialized() || !o.materialized()) return false;
  return adj_ == o.adj_;
}

ShiftSpec ShiftSpec::finite_graph(int vertex_count,
                                  const std::vector<std::pair<int, int>>& edges) {
  if (vertex_count <= 0) throw ParseError("vertex count must be positive");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertex_count));
  for (auto [i, j] : edges) {
    if (i < 0 || i >= vertex_count || j < 0 || j >= vertex_count)
      throw ParseError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                       ") references an undeclared vertex");
    adj[static_cast<std::size_t>(i)].push_back(j);
  }
  for (int v = 0; v < vertex_count; ++v)
    if (adj[static_cast<std::size_t>(v)].empty())
      throw ParseError("vertex " + std::to_string(v) +
                       " has no outgoing edge (empty shift)");
  ShiftSpec s;
  s.kind_ = SpecKind::finite_graph;
  s.vertex_count_ = vertex_count;
  s.edges_ = edges;
  s.cutoff_ = vertex_count - 1;
  s.cached_full_ = Truncation::make(vertex_count, std::move(adj));
  return s;
}

ShiftSpec ShiftSpec::countable(std::string rule_name, EdgeRule rule, int cutoff,
                               bool infinite_entropy_hint) {
  if (cutoff < 0) throw ParseError("cutoff must be nonnegative");
  if (!rule) throw PreconditionError("countable spec requires an edge rule");
  ShiftSpec s;
  s.kind_ = SpecKind::truncated_countable;
  s.rule_name_ = std::move(rule_name);
  s.rule_ = std::move(rule);
  s.cutoff_ = cutoff;
  s.infinite_hint_ = infinite_entropy_hint;
  return s;
}

ShiftSpec ShiftSpec::full_shift_rule(int cutoff) {
  return countable("full", [](int, int) { return true; }, cutoff, true);
}

ShiftSpec ShiftSpec::loop_counts(std::vector<std::uint64_t> counts) {
  bool any = false;
  for (auto c : counts) any = any || c > 0;
  if (!any) throw ParseError("loop spec needs at least one positive count");
  if (!counts.empty() && counts[0] > 1)
    throw ParseError("counts[0] > 1: parallel length-1 loops cannot be realized "
                     "as a 0/1 graph");
  ShiftSpec s;
  s.kind_ = SpecKind::loop_counts;
  s.counts_ = std::move(counts);
  s.cutoff_ = static_cast<int>(s.counts_.size());
  return s;
}

TruncationPtr realize_loop_graph(std::span<const std::uint64_t> counts_by_length) {
  if (!counts_by_length.empty() && counts_by_length[0] > 1)
    throw PreconditionError("cannot realize parallel self-loops in a 0/1 graph");
  std::uint64_t vertices = 1;
  for (std::size_t m = 2; m <= counts_by_length.size(); ++m)
    vertices += counts_by_length[m - 1] * (m - 1);
  if (vertices > 2'000'000)
    throw PreconditionError("loop graph too large to materialize (" +
                            std::to_string(vertices) + " vertices)");
  const int n = static_cast<int>(vertices);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  int fresh = 1;
  if (!counts_by_length.empty() && counts_by_length[0] == 1) adj[0].push_back(0);
  for (std::size_t m = 2; m <= counts_by_length.size(); ++m) {
    for (std::uint64_t j = 0; j < counts_by_length[m - 1]; ++j) {
      adj[0].push_back(fresh);
      for (std::size_t t = 0; t + 2 < m; ++t) {
        adj[static_cast<std::size_t>(fresh)].push_back(fresh + 1);
        ++fresh;
      }
      adj[static_cast<std::size_t>(fresh)].push_back(0);
      ++fresh;
    }
  }
  return Truncation::make(n, std::move(adj));
}

TruncationPtr ShiftSpec::truncate(int k) const {
  if (k < 0) throw PreconditionError("truncation depth must be nonnegative");
  switch (kind_) {
    case SpecKind::finite_graph:
      return cached_full_;  // constant exhaustion
    case SpecKind::truncated_countable: {
      const int m = std::min(k, cutoff_);
      const int n = m + 1;
      if (rule_name_ == "full") return Truncation::make_complete(n);
      if (n > kRuleMaterializeLimit)
        throw PreconditionError("rule truncation too large to materialize");
      std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (rule_(i, j)) adj[static_cast<std::size_t>(i)].push_back(j);
      return Truncation::make(n, std::move(adj));
    }
    case SpecKind::loop_counts: {
      const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                    counts_.size());
      return realize_loop_graph(std::span<const std::uint64_t>(counts_.data(), len));
    }
  }
  throw Error("unreachable");
}

TruncationPtr ShiftSpec::full_truncation() const {
  switch (kind_) {
    case SpecKind::finite_graph:
      return cached_full_;
    case SpecKind::truncated_countable:
      return truncate(cutoff_);
    case SpecKind::loop_counts:
      return truncate(static_cast<int>(counts_.size()));
  }
  throw Error("unreachable");
}

bool ShiftSpec::finite_entropy_flag() const {
  switch (kind_) {
    case SpecKind::finite_graph:
      return true;
    case SpecKind::truncated_countable:
      return !infinite_hint_;
    case SpecKind::loop_counts: {
      for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] == 0) continue;
        const double rate = std::log(static_cast<double>(counts_[i])) /
                            static_cast<double>(i + 1);
        if (rate > kEntropyCapNats) return false;
      }
      return true;
    }
  }
  throw Error("unreachable");
}

bool is_admissible(const Truncation& t, const Word& w) {
  if (w.symbols.empty()) throw PreconditionError("empty word");
  for (int s : w.symbols) t.check_vertex(s);
  for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
    if (!t.edge(w.symbols[i], w.symbols[i + 1])) return false;
  return true;
}

std::vector<BigInt> loops_at_sequence(const Truncation& t, int a, int n_max) {
  t.check_vertex(a);
  if (n_max < 1) throw PreconditionError("n must be positive");
  std::vector<BigInt> out;
  out.reserve(static_cast<std::size_t>(n_max));
  if (t.complete() && !t.materialized()) {
    // All-ones adjacency: (A^n)_aa = size^{n-1}.
    BigInt z = 1;
    for (int n = 1; n <= n_max; ++n) {
      out.push_back(z);
      z *= t.size();
    }
    return out;
  }
  const int n = t.size();
  std::vector<BigInt> row(static_cast<std::size_t>(n), 0), next(static_cast<std::size_t>(n));
  row[static_cast<std::size_t>(a)] = 1;
  for (int step = 1; step <= n_max; ++step) {
    for (auto& x : next) x = 0;
    for (int i = 0; i < n; ++i) {
      if (row[static_cast<std::size_t>(i)] == 0) continue;
      for (int j : t.neighbors(i)) next[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(i)];
    }
    row.swap(next);
    out.push_back(row[static_cast<std::size_t>(a)]);
  }
  return out;
}

BigInt loops_at(const Truncation& t, int a, int n) {
  if (n < 1) throw PreconditionError("n must be positive");
  return loops_at_sequence(t, a, n).back();
}

std::vector<Word> first_return_words(const Truncation& t, int a, int n,
                                     std::size_t budget) {
  t.check_vertex(a);
  if (n < 0) throw PreconditionError("interior length must be nonnegative");
  std::vector<Word> out;
  if (n == 0) {
    if (t.edge(a, a)) out.emplace_back(std::vector<int>{a, a});
    return out;
  }
  if (t.complete() && !t.materialized()) {
    // Count would be (size-1)^n; refuse rather than enumerate blindly.
    double logc = static_cast<double>(n) * std::log(static_cast<double>(t.size() - 1));
    if (logc > std::log(static_cast<double>(budget)))
      throw PreconditionError("first-return enumeration exceeds budget");
  }
  std::vector<int> interior;
  interior.reserve(static_cast<std::size_t>(n));
  // Lexicographic DFS over a-free interiors.
  std::function<void(int)> go = [&](int v) {
    if (static_cast<int>(interior.size()) == n) {
      if (t.edge(v, a)) {
        if (out.size() >= budget)
          throw PreconditionError("first-return enumeration exceeds budget");
        std::vector<int> w;
        w.reserve(static_cast<std::size_t>(n) + 2);
        w.push_back(a);
        w.insert(w.end(), interior.begin(), interior.end());
        w.push_back(a);
        out.emplace_back(std::move(w));
      }
      return;
    }
    t.for_neighbors(v, [&](int j) {
      if (j == a) return true;
      interior.push_back(j);
      go(j);
      interior.pop_back();
      return true;
    });
  };
  go(a);
  return out;
}

std::vector<BigInt> first_return_counts(const Truncation& t, int a, int n_max) {
  t.check_vertex(a);
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");
  std::vector<BigInt> out(static_cast<std::size_t>(n_max) + 1, 0);
  out[0] = t.edge(a, a) ? 1 : 0;
  if (n_max == 0) return out;
  if (t.complete() && !t.materialized()) {
    // Interiors over the complete graph minus a: (size-1)^n words.
    BigInt c = 1;
    for (int n = 1; n <= n_max; ++n) {
      c *= t.size() - 1;
      out[static_cast<std::size_t>(n)] = c;
    }
    return out;
  }
  const int n = t.size();
  // u = indicator row of successors of a restricted to V \ {a}; advance by the
  // a-deleted adjacency and close each level with edges back into a.
  std::vector<BigInt> u(static_cast<std::size_t>(n), 0), next(static_cast<std::size_t>(n));
  for (int j : t.neighbors(a))
    if (j != a) u[static_cast<std::size_t>(j)] = 1;
  for (int level = 1; level <= n_max; ++level) {
    BigInt c = 0;
    for (int j = 0; j < n; ++j)
      if (u[static_cast<std::size_t>(j)] != 0 && t.edge(j, a)) c += u[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(level)] = c;
    for (auto& x : next) x = 0;
    for (int i = 0; i < n; ++i) {
      if (i == a || u[static_cast<std::size_t>(i)] == 0) continue;
      for (int j : t.neighbors(i))
        if (j != a) next[static_cast<std::size_t>(j)] += u[static_cast<std::size_t>(i)];
    }
    u.swap(next);
  }
  return out;
}

std::vector<BigInt> loop_counts_via_renewal(const Truncation& t, int a, int n_max) {
  if (n_max < 1) throw PreconditionError("n_max must be positive");
  const std::vector<BigInt> z = loops_at_sequence(t, a, n_max);
  auto Z = [&](int m) -> const BigInt& {
    static const BigInt one = 1;
    return m == 0 ? one : z[static_cast<std::size_t>(m) - 1];
  };
  std::vector<BigInt> c(static_cast<std::size_t>(n_max) + 1, 0);
  for (int m = 1; m <= n_max; ++m) {
    BigInt v = Z(m);
    for (int j = 1; j < m; ++j) v -= c[static_cast<std::size_t>(j)] * Z(m - j);
    if (v < 0) throw NumericalError("renewal inversion produced a negative count");
    c[static_cast<std::size_t>(m)] = v;
  }
  return std::vector<BigInt>(c.begin() + 1, c.end());
}

bool is_transitive(const Truncation& t) {
  return t.scc().size() == 1;
}

}  // namespace melab
