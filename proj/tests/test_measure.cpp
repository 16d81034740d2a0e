#include <doctest.h>

#include <cmath>
#include <random>

#include "melab/corpus.hpp"
#include "melab/entropy.hpp"
#include "melab/io.hpp"
#include "melab/measure.hpp"

using namespace melab;

namespace {

const double kGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

Eigen::MatrixXd golden_example_matrix() {
  Eigen::MatrixXd P(2, 2);
  P << 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0;
  return P;
}

MarkovMeasure golden_example_measure() {
  return MarkovMeasure::markov(golden_mean_spec().full_truncation(), {0, 1},
                               golden_example_matrix());
}

}  // namespace

TEST_CASE("stationary vectors of simple chains") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  Eigen::VectorXd p = stationary_distribution(swap);
  CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::MatrixXd doubly(2, 2);
  doubly << 0.5, 0.5, 0.5, 0.5;
  p = stationary_distribution(doubly);
  CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-14));

  // Solving p P = p by hand for [[2/3,1/3],[1,0]] gives p = (3/4, 1/4).
  p = stationary_distribution(golden_example_matrix());
  CHECK(p(0) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(p(1) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("reducible chains are rejected with their components") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  try {
    stationary_distribution(id);
    FAIL("expected a PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("components") != std::string::npos);
  }
}

TEST_CASE("large-support stationary vectors use the iterative route") {
  // Random walk on a directed cycle of 80 states plus uniform restarts.
  const int n = 80;
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(n, n, 0.2 / n);
  for (int i = 0; i < n; ++i) P(i, (i + 1) % n) += 0.8;
  const Eigen::VectorXd p = stationary_distribution(P);
  for (int i = 0; i < n; ++i)
    CHECK(p(i) == doctest::Approx(1.0 / n).epsilon(1e-10));
}

TEST_CASE("cylinder masses follow the product formula") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto fair = MarkovMeasure::bernoulli(full2, {0, 1}, {0.5, 0.5});
  CHECK(cylinder_mass(fair, Word({0, 1})) == doctest::Approx(0.25).epsilon(1e-15));

  const auto fixed = MarkovMeasure::dirac_periodic(full2, {0});
  CHECK(cylinder_mass(fixed, Word({0, 0, 0})) == 1.0);
  CHECK(cylinder_mass(fixed, Word({0, 1})) == 0.0);  // leaves the support

  const auto gm = golden_example_measure();
  // (3/4) * (1/3) * 1 by hand.
  CHECK(cylinder_mass(gm, Word({0, 1, 0})) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK_THROWS_AS(cylinder_mass(gm, Word({1, 1})), PreconditionError);
  // Offsets do not change masses (shift invariance).
  CHECK(cylinder_mass(gm, Word({0, 1, 0}, -5)) ==
        cylinder_mass(gm, Word({0, 1, 0}, 3)));
}

TEST_CASE("partition entropy tables") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto fair = MarkovMeasure::bernoulli(full2, {0, 1}, {0.5, 0.5});
  const auto table = partition_entropy(fair, 3);
  CHECK(table.H[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(table.H[2] == doctest::Approx(3 * std::log(2.0)).epsilon(1e-14));

  const auto fixed = MarkovMeasure::dirac_periodic(full2, {0});
  for (double H : partition_entropy(fixed, 4).H) CHECK(H == 0.0);
}

TEST_CASE("counterexample measure H1 matches the frozen closed form") {
  const auto mu = bernoulli_counterexample_measure(std::log(2.0), 100);
  const auto table = partition_entropy(mu, 1);
  // High-precision evaluation of -(1-a)log(1-a) - a log a + a log 100.
  CHECK(table.H[0] == doctest::Approx(1.1167485450380676626).epsilon(1e-12));
  CHECK(cylinder_mass(mu, Word({0})) ==
        doctest::Approx(1.0 - 0.15051499783199059761).epsilon(1e-14));
}

TEST_CASE("counterexample validity boundary") {
  CHECK_THROWS_AS(bernoulli_counterexample_measure(std::log(2.0), 2), PreconditionError);
  CHECK_THROWS_AS(bernoulli_counterexample_measure(0.0, 100), PreconditionError);
  CHECK_THROWS_AS(bernoulli_counterexample_measure(-1.0, 100), PreconditionError);
}

TEST_CASE("cylinder masses of the counterexample collapse onto the fixed point") {
  for (double h : {0.5, std::log(2.0)}) {
    double prev = 0.0;
    for (long n : {10L, 100L, 1000L, 10000L}) {
      const auto mu = bernoulli_counterexample_measure(h, n);
      const double m0 = cylinder_mass(mu, Word({0}));
      CHECK(m0 > prev);
      prev = m0;
    }
    CHECK(prev > 0.9);
  }
}

TEST_CASE("enumeration budget failures are explicit") {
  const auto mu = bernoulli_counterexample_measure(std::log(2.0), 1000);
  CHECK_THROWS_AS(partition_entropy(mu, 3, 10'000), PreconditionError);
}

TEST_CASE("ks entropy closed forms") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  Eigen::MatrixXd doubly(2, 2);
  doubly << 0.5, 0.5, 0.5, 0.5;
  const auto coin = MarkovMeasure::markov(full2, {0, 1}, doubly);
  CHECK(ks_entropy(coin) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const auto rotation = MarkovMeasure::dirac_periodic(full2, {0, 1});
  CHECK(ks_entropy(rotation) == 0.0);

  // The measure of maximal entropy attains the topological entropy.
  const auto parry = parry_measure(golden_mean_spec().full_truncation());
  CHECK(ks_entropy(parry) == doctest::Approx(kGolden).epsilon(1e-11));
}

TEST_CASE("Markov exactness: entropy increments are constant") {
  std::mt19937_64 rng(31);
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    const auto mu = random_markov_measure(t, rng);
    const double h = ks_entropy(mu);
    const auto table = partition_entropy(mu, 7);
    for (std::size_t k = 0; k + 1 < table.H.size(); ++k)
      CHECK(table.H[k + 1] - table.H[k] == doctest::Approx(h).epsilon(1e-10));
    for (std::size_t k = 0; k + 1 < table.ratio.size(); ++k)
      CHECK(table.ratio[k + 1] <= table.ratio[k] + 1e-12);
  }
}

TEST_CASE("free energy of flat and constant potentials") {
  const auto gm = golden_example_measure();
  CHECK(free_energy(gm, Potential::constant(0.0)) ==
        doctest::Approx(ks_entropy(gm)).epsilon(1e-14));
  CHECK(free_energy(gm, Potential::constant(2.5)) ==
        doctest::Approx(ks_entropy(gm) + 2.5).epsilon(1e-13));
  // Potentials missing a positive-mass word are reported.
  const Potential partial = Potential::from_table(1, {{{0}, 1.0}});
  CHECK_THROWS_AS(free_energy(gm, partial), PreconditionError);
}

TEST_CASE("equilibrium pair attains the pressure") {
  std::map<std::vector<int>, double> table{{{0}, -std::log(2.0)}, {{1}, 0.0}};
  const Potential phi = Potential::from_table(1, std::move(table));
  const TruncationPtr t = golden_mean_spec().full_truncation();
  const auto eq = equilibrium_measure(t, phi);
  const double pressure = gurevich_pressure(golden_mean_spec(), phi, 2, 1e-9).value;
  CHECK(free_energy(eq, phi) == doctest::Approx(pressure).epsilon(1e-8));
}

TEST_CASE("variational inequality on seeded pairs") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    for (int trial = 0; trial < 10; ++trial) {
      const auto mu = random_markov_measure(t, rng);
      std::map<std::vector<int>, double> table;
      for (int v = 0; v < t->size(); ++v) table[{v}] = unif(rng);
      const Potential phi = Potential::from_table(1, std::move(table));
      const double p = gurevich_pressure(g.spec, phi, 3, 1e-9).value;
      CHECK(free_energy(mu, phi) <= p + 1e-6);
    }
  }
}

TEST_CASE("measure entropy never exceeds the entropy of its support graph") {
  std::mt19937_64 rng(41);
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    const auto mu = random_markov_measure(t, rng);
    const double h_top = std::log(spectral_radius(adjacency_matrix(*t)));
    CHECK(ks_entropy(mu) <= h_top + 1e-8);
  }
}

TEST_CASE("constructor validation") {
  const TruncationPtr gm = golden_mean_spec().full_truncation();
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 1.0, 0.0;  // row 0 sums to 1.1
  CHECK_THROWS_AS(MarkovMeasure::markov(gm, {0, 1}, bad), PreconditionError);
  Eigen::MatrixXd forbidden(2, 2);
  forbidden << 0.5, 0.5, 0.5, 0.5;  // uses the forbidden edge 1 -> 1
  CHECK_THROWS_AS(MarkovMeasure::markov(gm, {0, 1}, forbidden), PreconditionError);
  // Bernoulli on the golden-mean graph needs the 1 -> 1 edge: rejected.
  CHECK_THROWS_AS(MarkovMeasure::bernoulli(gm, {0, 1}, {0.5, 0.5}), PreconditionError);
  // A wrong stationary vector is rejected.
  Eigen::VectorXd wrong(2);
  wrong << 0.5, 0.5;
  CHECK_THROWS_AS(
      MarkovMeasure::markov(gm, {0, 1}, golden_example_matrix(), wrong),
      PreconditionError);
  // Orbit with a forbidden step.
  CHECK_THROWS_AS(MarkovMeasure::dirac_periodic(gm, {1, 1}), PreconditionError);
}

TEST_CASE("ergodicity flag tracks the positivity pattern") {
  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  const auto split = MarkovMeasure::markov(full2, {0, 1}, id, p);
  CHECK_FALSE(split.ergodic());
  CHECK(golden_example_measure().ergodic());
}

TEST_CASE("measure documents parse and round-trip") {
  const TruncationPtr gm = golden_mean_spec().full_truncation();
  const auto mu = parse_measure(
      R"({"type":"markov","support":[0,1],"P":[[0.6666666666666666,0.3333333333333333],[1.0,0.0]]})",
      gm);
  CHECK(mu.kind() == MeasureKind::markov);
  CHECK(mu.stationary(0) == doctest::Approx(0.75).epsilon(1e-12));
  const auto again = parse_measure(serialize_measure(mu), gm);
  CHECK(again.stationary(0) == mu.stationary(0));

  const TruncationPtr full2 = full_graph_spec(2).full_truncation();
  const auto bern =
      parse_measure(R"({"type":"bernoulli","support":[0,1],"p":[0.25,0.75]})", full2);
  CHECK(bern.kind() == MeasureKind::bernoulli);
  const auto dirac = parse_measure(R"({"type":"dirac","support":[0,1]})", full2);
  CHECK(dirac.kind() == MeasureKind::dirac_periodic);
  CHECK_THROWS_AS(parse_measure(R"({"type":"markov","support":[0,1]})", gm), ParseError);
  CHECK_THROWS_AS(
      parse_measure(R"({"type":"bernoulli","support":[0],"p":[1.0],"x":1})", full2),
      ParseError);
}
