#include <doctest.h>

#include <cmath>
#include <random>

#include "melab/corpus.hpp"
#include "melab/entropy.hpp"
#include "melab/recoding.hpp"

using namespace melab;

namespace {

// Random bracketed word assembled from labeled first-return blocks.
Word random_bracketed_word(const LoopSystem& ls, std::mt19937_64& rng, int max_blocks) {
  std::vector<int> nonempty_levels;
  for (int n = 0; n <= ls.labeled_horizon; ++n)
    if (!ls.labels[static_cast<std::size_t>(n)].empty()) nonempty_levels.push_back(n);
  REQUIRE(!nonempty_levels.empty());
  const int blocks = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_blocks));
  std::vector<int> symbols{ls.source_vertex};
  for (int b = 0; b < blocks; ++b) {
    const int level =
        nonempty_levels[rng() % nonempty_levels.size()];
    const auto& lvl = ls.labels[static_cast<std::size_t>(level)];
    const auto& w = lvl[rng() % lvl.size()].symbols;
    symbols.insert(symbols.end(), w.begin() + 1, w.end());
  }
  return Word(std::move(symbols));
}

}  // namespace

TEST_CASE("full 2-shift loop system has one loop per level") {
  const LoopSystem ls = build_loop_system(full_graph_spec(2), 0, 12);
  for (int n = 0; n <= 12; ++n) CHECK(ls.counts[static_cast<std::size_t>(n)] == 1);
  CHECK(ls.labeled_horizon == 12);
}

TEST_CASE("golden-mean loop system is the direct loop plus [0 1 0]") {
  const LoopSystem ls = build_loop_system(golden_mean_spec(), 0, 8);
  CHECK(ls.counts[0] == 1);
  CHECK(ls.counts[1] == 1);
  for (int n = 2; n <= 8; ++n) CHECK(ls.counts[static_cast<std::size_t>(n)] == 0);
  CHECK(ls.labels[1][0].symbols == std::vector<int>{0, 1, 0});
  // The canonical loop graph of these counts is the golden-mean graph itself.
  CHECK(ls.loop_graph->size() == 2);
  CHECK(ls.loop_graph->edge(0, 0));
  CHECK(ls.loop_graph->edge(0, 1));
  CHECK(ls.loop_graph->edge(1, 0));
  CHECK_FALSE(ls.loop_graph->edge(1, 1));
}

TEST_CASE("single self-loop recodes to itself") {
  const LoopSystem ls = build_loop_system(ShiftSpec::finite_graph(1, {{0, 0}}), 0, 5);
  CHECK(ls.counts[0] == 1);
  for (int n = 1; n <= 5; ++n) CHECK(ls.counts[static_cast<std::size_t>(n)] == 0);
}

TEST_CASE("level counts match the word enumeration exactly") {
  for (const auto& g : standard_graph_corpus()) {
    const LoopSystem ls = build_loop_system(g.spec, g.marked_vertex, 12);
    const TruncationPtr t = g.spec.full_truncation();
    for (int n = 0; n <= ls.labeled_horizon && n <= 6; ++n)
      CHECK(ls.counts[static_cast<std::size_t>(n)] ==
            BigInt(first_return_words(*t, g.marked_vertex, n, 3'000'000).size()));
    // And with the renewal inversion on every level.
    const auto renewal = loop_counts_via_renewal(*t, g.marked_vertex, 13);
    for (int n = 0; n <= 12; ++n)
      CHECK(ls.counts[static_cast<std::size_t>(n)] == renewal[static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("empty blocks recode to base repetitions") {
  const LoopSystem ls = build_loop_system(full_graph_spec(2), 0, 6);
  const Word w({0, 0});
  const Word r = recode_word(ls, w);
  CHECK(r.symbols == std::vector<int>{0, 0});
  CHECK(decode_word(ls, r) == w);
}

TEST_CASE("hand recoding on the full 2-shift") {
  const LoopSystem ls = build_loop_system(full_graph_spec(2), 0, 6);
  // Blocks [1] (level 1) and [1 1] (level 2) map to the canonical chains of
  // the loops of lengths 2 and 3: fresh vertices 1 and 2,3.
  const Word w({0, 1, 0, 1, 1, 0});
  const Word r = recode_word(ls, w);
  CHECK(r.symbols == std::vector<int>{0, 1, 0, 2, 3, 0});
  CHECK(r.size() == w.size());
  CHECK(is_admissible(*ls.loop_graph, r));
  CHECK(decode_word(ls, r) == w);
}

TEST_CASE("recoding preserves offsets, lengths and admissibility") {
  std::mt19937_64 rng(43);
  for (const auto& g : standard_graph_corpus()) {
    const LoopSystem ls = build_loop_system(g.spec, g.marked_vertex, 10, 50'000);
    for (int trial = 0; trial < 50; ++trial) {
      const Word w = random_bracketed_word(ls, rng, 5);
      const Word r = recode_word(ls, w);
      CHECK(r.size() == w.size());
      CHECK(r.offset == w.offset);
      CHECK(is_admissible(*ls.loop_graph, r));
      CHECK(decode_word(ls, r) == w);
    }
  }
}

TEST_CASE("recoding commutes with block concatenation") {
  std::mt19937_64 rng(47);
  const LoopSystem ls = build_loop_system(full_graph_spec(3), 0, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const Word w1 = random_bracketed_word(ls, rng, 3);
    const Word w2 = random_bracketed_word(ls, rng, 3);
    std::vector<int> cat = w1.symbols;
    cat.insert(cat.end(), w2.symbols.begin() + 1, w2.symbols.end());
    const Word joint = recode_word(ls, Word(cat));
    std::vector<int> expect = recode_word(ls, w1).symbols;
    const auto tail = recode_word(ls, w2).symbols;
    expect.insert(expect.end(), tail.begin() + 1, tail.end());
    CHECK(joint.symbols == expect);
  }
}

TEST_CASE("malformed recoding inputs are rejected") {
  const LoopSystem ls = build_loop_system(golden_mean_spec(), 0, 4);
  CHECK_THROWS_AS(recode_word(ls, Word({1, 0, 1})), PreconditionError);
  CHECK_THROWS_AS(recode_word(ls, Word({0, 1, 1, 0})), PreconditionError);
  // Blocks beyond the labeled horizon are refused, not guessed.
  const LoopSystem tight = build_loop_system(full_graph_spec(3), 0, 10, 10);
  CHECK(tight.labeled_horizon < 10);
  std::vector<int> symbols{0};
  for (int i = 0; i < tight.labeled_horizon + 1; ++i) symbols.push_back(1);
  symbols.push_back(0);
  CHECK_THROWS_AS(recode_word(tight, Word(symbols)), PreconditionError);
}

TEST_CASE("loop-system entropy equals source entropy") {
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    const double spectral = std::log(spectral_radius(adjacency_matrix(*t)));
    const auto counts = loop_counts_via_renewal(*t, g.marked_vertex, 200);
    CHECK(loop_system_entropy(counts, 1e-12).value ==
          doctest::Approx(spectral).epsilon(1e-6));
  }
}

TEST_CASE("geometric return distribution of the fair coin") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto fair = MarkovMeasure::bernoulli(full2, {0, 1}, {0.5, 0.5});
  const auto rd = induced_return_distribution(fair, 0, 30);
  for (int n = 0; n <= 30; ++n)
    CHECK(rd.level_prob[static_cast<std::size_t>(n)] ==
          doctest::Approx(std::ldexp(1.0, -(n + 1))).epsilon(1e-12));
  CHECK(rd.deficit == doctest::Approx(std::ldexp(1.0, -31)).epsilon(1e-9));
}

TEST_CASE("point mass at a fixed point returns immediately") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto fixed = MarkovMeasure::dirac_periodic(full2, {0});
  const auto rd = induced_return_distribution(fixed, 0, 5);
  CHECK(rd.level_prob[0] == 1.0);
  CHECK(rd.total == 1.0);
  CHECK(rd.truncated_mean_return == 1.0);
}

TEST_CASE("golden-mean example measure has exactly two return words") {
  Eigen::MatrixXd P(2, 2);
  P << 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0;
  const auto mu =
      MarkovMeasure::markov(golden_mean_spec().full_truncation(), {0, 1}, P);
  const auto rd = induced_return_distribution(mu, 0, 2);
  CHECK(rd.level_prob[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(rd.level_prob[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(rd.level_prob[2] == 0.0);
  CHECK(rd.total == doctest::Approx(1.0).epsilon(1e-14));
  // Kac: expected return time 1*(2/3) + 2*(1/3) = 4/3 = 1 / (3/4).
  CHECK(rd.truncated_mean_return == doctest::Approx(1.0 / rd.base_mass).epsilon(1e-13));
  REQUIRE(rd.words_horizon == 2);
  CHECK(rd.words[0][0].first.symbols == std::vector<int>{0, 0});
  CHECK(rd.words[1][0].first.symbols == std::vector<int>{0, 1, 0});
}

TEST_CASE("null base cylinders and non-ergodic measures are rejected") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto fixed = MarkovMeasure::dirac_periodic(full2, {0});
  CHECK_THROWS_AS(induced_return_distribution(fixed, 1, 5), PreconditionError);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  const auto split = MarkovMeasure::markov(full2, {0, 1}, id, p);
  CHECK_THROWS_AS(induced_return_distribution(split, 0, 5), PreconditionError);
}

TEST_CASE("Kac identity within the reported deficit on biased measures") {
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    const int a = g.marked_vertex;
    // Equilibrium measure of a potential favoring the marked vertex: returns
    // concentrate and the level-40 deficit is negligible.
    std::map<std::vector<int>, double> table;
    for (int v = 0; v < t->size(); ++v) table[{v}] = v == a ? 3.0 : 0.0;
    const auto mu = equilibrium_measure(t, Potential::from_table(1, std::move(table)));
    const auto rd = induced_return_distribution(mu, a, 40);
    CHECK(rd.deficit < 1e-6);
    const int la = mu.local_index(a);
    CHECK(std::abs(rd.truncated_mean_return - 1.0 / mu.stationary(la)) <
          200.0 * rd.deficit + 1e-9);
  }
}
