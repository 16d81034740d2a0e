#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "melab/corpus.hpp"
#include "melab/entropy.hpp"

using namespace melab;

namespace {

const double kGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

// Independent oracle: dense eigensolver, max modulus eigenvalue.
double eigen_spectral_radius(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  return rho;
}

}  // namespace

TEST_CASE("power iteration matches closed forms") {
  Eigen::MatrixXd gm(2, 2);
  gm << 1, 1, 1, 0;
  CHECK(spectral_radius(gm) == doctest::Approx(std::exp(kGolden)).epsilon(1e-13));
  // Period-2 matrix: the +I shift keeps the iteration from stalling.
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(spectral_radius(swap) == doctest::Approx(1.0).epsilon(1e-13));
  Eigen::MatrixXd weighted(2, 2);
  weighted << 0.5, 0.5, 1.0, 0.0;  // characteristic root exactly 1
  CHECK(spectral_radius(weighted) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd reducible(3, 3);
  reducible << 2, 1, 0, 0, 3, 0, 0, 0, 1;  // upper triangular: rho = 3
  CHECK(spectral_radius(reducible) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("power iteration agrees with the dense eigensolver on random matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = unif(rng) < 0.4 ? 0.0 : unif(rng);
    CHECK(spectral_radius(A) == doctest::Approx(eigen_spectral_radius(A)).epsilon(1e-9));
  }
}

TEST_CASE("periodic-orbit estimates approach the spectral value") {
  const auto full2 = gurevich_entropy_periodic(full_graph_spec(2), 0, 30);
  CHECK(std::abs(full2.value - std::log(2.0)) < 0.05);
  CHECK(full2.diagnostics.size() == 30);
  // Single self-loop: Z_n = 1 for every n.
  const auto self_loop = gurevich_entropy_periodic(
      ShiftSpec::finite_graph(1, {{0, 0}}), 0, 10);
  for (const auto& [n, partial] : self_loop.diagnostics) CHECK(partial == 0.0);
  CHECK(self_loop.value == 0.0);
  const auto gm = gurevich_entropy_periodic(golden_mean_spec(), 0, 40);
  CHECK(std::abs(gm.value - kGolden) < 0.02);
  // A vertex on no loop is an error.
  const ShiftSpec line = ShiftSpec::finite_graph(2, {{0, 1}, {1, 1}});
  CHECK_THROWS_AS(gurevich_entropy_periodic(line, 0, 10), PreconditionError);
}

TEST_CASE("truncation estimator on the full countable shift grows like log(k+1)") {
  const ShiftSpec full = ShiftSpec::full_shift_rule(1000);
  const auto est = gurevich_entropy_truncation(full, 30, 1e-6);
  REQUIRE(est.diagnostics.size() == 31);
  for (int k = 0; k <= 30; ++k)
    CHECK(est.diagnostics[static_cast<std::size_t>(k)].second ==
          doctest::Approx(std::log(static_cast<double>(k + 1))).epsilon(1e-12));
  CHECK_FALSE(est.converged);
  CHECK(est.infinite_entropy_suspected);
}

TEST_CASE("truncation estimator is exact and converged on a fixed graph") {
  const auto est = gurevich_entropy_truncation(golden_mean_spec(), 10, 1e-9);
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(kGolden).epsilon(1e-9));
  CHECK_FALSE(est.infinite_entropy_suspected);
}

TEST_CASE("truncation partials are nondecreasing along the exhaustion") {
  const ShiftSpec full = ShiftSpec::full_shift_rule(64);
  const auto est = gurevich_entropy_truncation(full, 20, 1e-6);
  for (std::size_t i = 1; i < est.diagnostics.size(); ++i)
    CHECK(est.diagnostics[i].second >= est.diagnostics[i - 1].second - 1e-12);
}

TEST_CASE("renewal entropy of the golden-mean counts") {
  const auto est = loop_system_entropy(std::vector<std::uint64_t>{1, 1}, 1e-12);
  CHECK(est.value == doctest::Approx(kGolden).epsilon(1e-9));
  CHECK(est.converged);
  // Cross-check against the spectral radius of the realized graph.
  Eigen::MatrixXd gm(2, 2);
  gm << 1, 1, 1, 0;
  CHECK(est.value == doctest::Approx(std::log(spectral_radius(gm))).epsilon(1e-11));
}

TEST_CASE("renewal entropy of the all-ones counts tends to log 2") {
  const auto est =
      loop_system_entropy(std::vector<std::uint64_t>(60, 1), 1e-12);
  CHECK(est.value == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("k self-loops give entropy log k") {
  for (std::uint64_t k = 1; k <= 10; ++k) {
    const auto est = loop_system_entropy(std::vector<std::uint64_t>{k}, 1e-12);
    CHECK(est.value ==
          doctest::Approx(std::log(static_cast<double>(k))).epsilon(1e-12));
    if (k == 1) CHECK(est.boundary_no_root);
  }
}

TEST_CASE("renewal boundary and error cases") {
  // A single long loop never sums to 1 below x = 1.
  const auto boundary = loop_system_entropy(std::vector<std::uint64_t>{0, 0, 0, 1}, 1e-12);
  CHECK(boundary.boundary_no_root);
  CHECK(boundary.value == 0.0);
  CHECK_THROWS_AS(loop_system_entropy(std::vector<std::uint64_t>{0, 0}, 1e-12),
                  PreconditionError);
  CHECK_THROWS_AS(loop_system_entropy(ShiftSpec::loop_counts({1, 1}), 1, 1e-12),
                  PreconditionError);  // cutoff below the declared support
}

TEST_CASE("pressure of the zero potential is the topological entropy") {
  for (const auto& g : standard_graph_corpus()) {
    const auto p0 = gurevich_pressure(g.spec, Potential::constant(0.0), 4, 1e-9);
    const auto h = gurevich_entropy_truncation(g.spec, 4, 1e-9);
    CHECK(p0.value == doctest::Approx(h.value).epsilon(1e-12));
  }
}

TEST_CASE("constant potentials shift the pressure additively") {
  const ShiftSpec full2 = full_graph_spec(2);
  for (double c : {-1.0, 0.25, 2.0}) {
    const auto p = gurevich_pressure(full2, Potential::constant(c), 2, 1e-9);
    CHECK(p.value == doctest::Approx(std::log(2.0) + c).epsilon(1e-11));
  }
}

TEST_CASE("weighted golden-mean pressure matches the eigen oracle") {
  std::map<std::vector<int>, double> table{{{0}, -std::log(2.0)}, {{1}, 0.0}};
  const Potential phi = Potential::from_table(1, std::move(table));
  const auto p = gurevich_pressure(golden_mean_spec(), phi, 2, 1e-9);
  Eigen::MatrixXd M(2, 2);
  M << 0.5, 0.5, 1.0, 0.0;
  CHECK(p.value == doctest::Approx(std::log(eigen_spectral_radius(M))).epsilon(1e-11));
  CHECK(p.value == doctest::Approx(0.0).epsilon(1e-11));  // root is exactly 1
}

TEST_CASE("depth-2 pressure reduces to entropy plus the constant") {
  const auto p = gurevich_pressure(golden_mean_spec(), Potential::constant(0.5, 2), 2, 1e-9);
  CHECK(p.value == doctest::Approx(kGolden + 0.5).epsilon(1e-11));
}

TEST_CASE("pressure lies between entropy shifted by potential bounds") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    std::map<std::vector<int>, double> table;
    double lo = 1e9, hi = -1e9;
    for (int v = 0; v < t->size(); ++v) {
      const double x = unif(rng);
      table[{v}] = x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const Potential phi = Potential::from_table(1, std::move(table));
    const double p = gurevich_pressure(g.spec, phi, 4, 1e-9).value;
    const double h = gurevich_entropy_truncation(g.spec, 4, 1e-9).value;
    CHECK(p >= h + lo - 1e-9);
    CHECK(p <= h + hi + 1e-9);
  }
}

TEST_CASE("the three entropy routes agree on every corpus graph") {
  for (const auto& g : standard_graph_corpus()) {
    const TruncationPtr t = g.spec.full_truncation();
    const int a = g.marked_vertex;
    const double spectral = gurevich_entropy_truncation(g.spec, 4, 1e-9).value;
    const double periodic = gurevich_entropy_periodic(*t, a, 60).value;
    CHECK(std::abs(periodic - spectral) < 0.05);
    const auto counts = loop_counts_via_renewal(*t, a, 200);
    const double renewal = loop_system_entropy(counts, 1e-12).value;
    CHECK(std::abs(renewal - spectral) < 1e-6);
  }
}

TEST_CASE("non-transitive truncations report per-component values") {
  // Self-loop component and a 2-cycle component: entropies 0 and 0; plus a
  // complete pair: entropy log 2.
  const ShiftSpec spec = ShiftSpec::finite_graph(
      4, {{0, 0}, {1, 2}, {2, 1}, {3, 3}, {3, 0}});
  const TruncationPtr t = spec.full_truncation();
  const auto radii = component_log_radii(*t);
  const auto& comps = t->scc();
  REQUIRE(radii.size() == comps.size());
  double max_val = -1e300;
  for (double r : radii) max_val = std::max(max_val, r);
  CHECK(max_val == doctest::Approx(std::log(spectral_radius(*t))).epsilon(1e-12));
  CHECK_FALSE(is_transitive(*t));
}

TEST_CASE("loop-spec exhaustion stabilizes and converges") {
  const auto est = gurevich_entropy_truncation(ShiftSpec::loop_counts({1, 1}), 10, 1e-9);
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(kGolden).epsilon(1e-11));
}

TEST_CASE("potential evaluation failures are reported") {
  std::map<std::vector<int>, double> partial_table{{{0}, 1.0}};
  const Potential phi = Potential::from_table(1, std::move(partial_table));
  CHECK_THROWS_AS(gurevich_pressure(golden_mean_spec(), phi, 2, 1e-9),
                  PreconditionError);
}
