#include "melab/recoding.hpp"

#include <algorithm>

namespace melab {

std::vector<std::uint64_t> LoopSystem::labeled_counts_by_length() const {
  std::vector<std::uint64_t> by_length(static_cast<std::size_t>(labeled_horizon) + 1, 0);
  for (int n = 0; n <= labeled_horizon; ++n)
    by_length[static_cast<std::size_t>(n)] =
        counts[static_cast<std::size_t>(n)].convert_to<std::uint64_t>();
  return by_length;
}

ShiftSpec LoopSystem::loop_spec() const {
  return ShiftSpec::loop_counts(labeled_counts_by_length());
}

std::vector<int> LoopSystem::interior(int level, int index) const {
  if (level < 0 || level > labeled_horizon)
    throw PreconditionError("level outside the labeled horizon");
  const auto& starts = chain_start_[static_cast<std::size_t>(level)];
  if (index < 0 || index >= static_cast<int>(starts.size()))
    throw PreconditionError("no loop with that index at level " + std::to_string(level));
  std::vector<int> chain(static_cast<std::size_t>(level));
  for (int t = 0; t < level; ++t)
    chain[static_cast<std::size_t>(t)] = starts[static_cast<std::size_t>(index)] + t;
  return chain;
}

LoopLabel LoopSystem::label_of_interior(const std::vector<int>& interior) const {
  auto it = by_interior_.find(interior);
  if (it == by_interior_.end())
    throw PreconditionError("first-return block beyond the labeled horizon or not "
                            "admissible at the base vertex");
  return it->second;
}

LoopLabel LoopSystem::label_of_chain(const std::vector<int>& chain) const {
  if (chain.empty()) {
    if (labeled_horizon < 0 || counts[0] == 0)
      throw PreconditionError("loop graph has no direct base loop");
    return LoopLabel{0, 0};
  }
  auto it = by_first_fresh_.find(chain.front());
  if (it == by_first_fresh_.end())
    throw PreconditionError("chain does not start a canonical loop interior");
  const LoopLabel lbl = it->second;
  if (static_cast<int>(chain.size()) != lbl.level)
    throw PreconditionError("chain length does not match its loop level");
  for (std::size_t t = 0; t < chain.size(); ++t)
    if (chain[t] != chain.front() + static_cast<int>(t))
      throw PreconditionError("chain is not a contiguous loop interior");
  return lbl;
}

LoopSystem build_loop_system(const ShiftSpec& spec, int a, int n_max,
                             std::size_t word_budget) {
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");
  TruncationPtr t = spec.full_truncation();
  t->check_vertex(a);
  LoopSystem ls;
  ls.source_vertex = a;
  ls.horizon = n_max;
  ls.counts = first_return_counts(*t, a, n_max);
  bool any = false;
  for (const auto& c : ls.counts) any = any || c > 0;
  if (!any)
    throw PreconditionError("vertex " + std::to_string(a) +
                            " lies on no loop within the horizon");
  // Label levels in order until the word budget is exhausted; the canonical
  // graph realization also caps the fresh vertices it will materialize.
  BigInt cumulative = 0;
  BigInt fresh_vertices = 0;
  int labeled = -1;
  for (int n = 0; n <= n_max; ++n) {
    cumulative += ls.counts[static_cast<std::size_t>(n)];
    fresh_vertices += ls.counts[static_cast<std::size_t>(n)] * n;
    if (cumulative > word_budget || fresh_vertices > 1'500'000) break;
    labeled = n;
  }
  if (labeled < 0)
    throw PreconditionError("word budget too small to label even level 0");
  ls.labeled_horizon = labeled;
  ls.labels.resize(static_cast<std::size_t>(labeled) + 1);
  for (int n = 0; n <= labeled; ++n) {
    auto words = first_return_words(*t, a, n, word_budget);
    std::sort(words.begin(), words.end());
    if (BigInt(words.size()) != ls.counts[static_cast<std::size_t>(n)])
      throw NumericalError("enumerated first-return words disagree with the count");
    ls.labels[static_cast<std::size_t>(n)] = std::move(words);
  }
  ls.loop_graph = realize_loop_graph(ls.labeled_counts_by_length());
  // Fresh ids follow (length, index) order inside realize_loop_graph.
  ls.chain_start_.resize(static_cast<std::size_t>(labeled) + 1);
  int fresh = 1;
  for (int n = 0; n <= labeled; ++n) {
    const auto& lvl = ls.labels[static_cast<std::size_t>(n)];
    auto& starts = ls.chain_start_[static_cast<std::size_t>(n)];
    for (int i = 0; i < static_cast<int>(lvl.size()); ++i) {
      starts.push_back(n == 0 ? 0 : fresh);
      if (n > 0) {
        ls.by_first_fresh_[fresh] = LoopLabel{n, i};
        fresh += n;
      }
      const auto& w = lvl[static_cast<std::size_t>(i)].symbols;
      ls.by_interior_[std::vector<int>(w.begin() + 1, w.end() - 1)] = LoopLabel{n, i};
    }
  }
  return ls;
}

namespace {

// Splits a word bracketed by `a` into the interiors between consecutive a's.
std::vector<std::vector<int>> split_blocks(const std::vector<int>& symbols, int a) {
  if (symbols.size() < 2 || symbols.front() != a || symbols.back() != a)
    throw PreconditionError("word must begin and end with the base vertex");
  std::vector<std::vector<int>> blocks;
  std::vector<int> cur;
  for (std::size_t i = 1; i < symbols.size(); ++i) {
    if (symbols[i] == a) {
      blocks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(symbols[i]);
    }
  }
  if (!cur.empty())
    throw PreconditionError("word must end with the base vertex");
  return blocks;
}

}  // namespace

Word recode_word(const LoopSystem& ls, const Word& w) {
  const auto blocks = split_blocks(w.symbols, ls.source_vertex);
  std::vector<int> out;
  out.reserve(w.symbols.size());
  out.push_back(0);
  for (const auto& block : blocks) {
    if (static_cast<int>(block.size()) > ls.labeled_horizon)
      throw PreconditionError("block of length " + std::to_string(block.size()) +
                              " exceeds the labeled horizon");
    const LoopLabel lbl = ls.label_of_interior(block);
    const auto chain = ls.interior(lbl.level, lbl.index);
    out.insert(out.end(), chain.begin(), chain.end());
    out.push_back(0);
  }
  return Word(std::move(out), w.offset);
}

Word decode_word(const LoopSystem& ls, const Word& w) {
  const auto blocks = split_blocks(w.symbols, 0);
  std::vector<int> out;
  out.reserve(w.symbols.size());
  const int a = ls.source_vertex;
  out.push_back(a);
  for (const auto& chain : blocks) {
    const LoopLabel lbl = ls.label_of_chain(chain);
    const auto& src = ls.labels[static_cast<std::size_t>(lbl.level)]
                               [static_cast<std::size_t>(lbl.index)].symbols;
    out.insert(out.end(), src.begin() + 1, src.end() - 1);
    out.push_back(a);
  }
  return Word(std::move(out), w.offset);
}

ReturnDistribution induced_return_distribution(const MarkovMeasure& mu, int a, int n_max,
                                               std::size_t word_budget) {
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");
  if (!mu.ergodic())
    throw PreconditionError("induced return distribution needs an ergodic measure");
  const int la = mu.local_index(a);
  const double pa = la >= 0 ? mu.stationary(la) : 0.0;
  if (pa <= 0.0)
    throw PreconditionError("mu([a]) = 0: the return set at vertex " +
                            std::to_string(a) + " is null");
  const int m = mu.support_size();
  if (m > 2048)
    throw PreconditionError("support too large for the dense return computation");
  ReturnDistribution rd;
  rd.vertex = a;
  rd.n_max = n_max;
  rd.base_mass = pa;
  rd.level_prob.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  // Conditional on [a], the level-n mass is sum over a-free paths of the
  // product of transition probabilities, closed by a step back into a.
  rd.level_prob[0] = mu.trans(la, la);
  std::vector<double> u(static_cast<std::size_t>(m), 0.0), next(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    if (j != la) u[static_cast<std::size_t>(j)] = mu.trans(la, j);
  for (int level = 1; level <= n_max; ++level) {
    double c = 0.0;
    for (int j = 0; j < m; ++j)
      if (u[static_cast<std::size_t>(j)] > 0.0)
        c += u[static_cast<std::size_t>(j)] * mu.trans(j, la);
    rd.level_prob[static_cast<std::size_t>(level)] = c;
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      if (i == la || u[static_cast<std::size_t>(i)] == 0.0) continue;
      for (int j = 0; j < m; ++j)
        if (j != la) next[static_cast<std::size_t>(j)] += u[static_cast<std::size_t>(i)] * mu.trans(i, j);
    }
    u.swap(next);
  }
  for (int n = 0; n <= n_max; ++n) {
    rd.total += rd.level_prob[static_cast<std::size_t>(n)];
    rd.truncated_mean_return +=
        static_cast<double>(n + 1) * rd.level_prob[static_cast<std::size_t>(n)];
  }
  rd.deficit = std::max(0.0, 1.0 - rd.total);
  // Explicit word probabilities as far as the budget allows.
  const Truncation& t = *mu.ambient();
  BigInt cumulative = 0;
  const auto counts = first_return_counts(t, a, n_max);
  for (int n = 0; n <= n_max; ++n) {
    cumulative += counts[static_cast<std::size_t>(n)];
    if (cumulative > word_budget) break;
    auto words = first_return_words(t, a, n, word_budget);
    std::sort(words.begin(), words.end());
    std::vector<std::pair<Word, double>> level;
    level.reserve(words.size());
    for (auto& w : words) {
      const double p = mu.mass(w) / pa;
      level.emplace_back(std::move(w), p);
    }
    rd.words.push_back(std::move(level));
    rd.words_horizon = n;
  }
  return rd;
}

}  // namespace melab
