#ifndef MELAB_MEASURE_HPP
#define MELAB_MEASURE_HPP

#include <Eigen/Dense>
#include <optional>

#include "melab/potential.hpp"
#include "melab/shift.hpp"

namespace melab {

enum class MeasureKind { markov, bernoulli, dirac_periodic };

const char* to_string(MeasureKind k);

// A shift-invariant measure supported on finitely many vertices of an
// ambient truncation: a row-stochastic matrix over the support together with
// its stationary vector. Bernoulli measures keep only their weight vector so
// the support may be very large; Dirac measures at periodic orbits are 0/1
// Markov chains on the orbit.
class MarkovMeasure {
 public:
  static MarkovMeasure markov(TruncationPtr ambient, std::vector<int> support,
                              Eigen::MatrixXd P,
                              std::optional<Eigen::VectorXd> stationary = std::nullopt);
  static MarkovMeasure bernoulli(TruncationPtr ambient, std::vector<int> support,
                                 std::vector<double> weights);
  static MarkovMeasure dirac_periodic(TruncationPtr ambient, std::vector<int> orbit);

  MeasureKind kind() const { return kind_; }
  const TruncationPtr& ambient() const { return ambient_; }
  const std::vector<int>& support() const { return support_; }
  int support_size() const { return static_cast<int>(support_.size()); }
  bool ergodic() const { return ergodic_; }

  // Local index of an ambient vertex, or -1 when outside the support.
  int local_index(int vertex) const;

  double stationary(int local) const { return pi_[static_cast<std::size_t>(local)]; }
  // Transition probability between support-local states.
  double trans(int local_i, int local_j) const;
  // Bernoulli weights (bernoulli kind only).
  const std::vector<double>& weights() const;
  const Eigen::MatrixXd& transition_matrix() const;

  // mu[w] = p_{w_1} prod P_{w_i w_{i+1}}; 0 when the word leaves the support.
  // Symbols are ambient vertex ids. Throws if the word is inadmissible.
  double mass(std::span<const int> word) const;
  double mass(const Word& w) const { return mass(std::span<const int>(w.symbols)); }

  // Support-local successors j of local state i with trans(i,j) > 0,
  // ascending. Bernoulli measures return the whole support.
  void for_positive_successors(int local_i, const std::function<bool(int)>& f) const;

  bool compatible_with(const MarkovMeasure& o) const;

 private:
  MarkovMeasure() = default;

  TruncationPtr ambient_;
  std::vector<int> support_;  // sorted ambient ids
  bool contiguous_ = false;   // support == {0..m-1}
  MeasureKind kind_ = MeasureKind::markov;
  Eigen::MatrixXd P_;         // markov / dirac_periodic
  std::vector<double> q_;     // bernoulli
  std::vector<double> pi_;
  bool ergodic_ = false;
};

// Unique stationary vector of an irreducible row-stochastic matrix: dense
// linear solve up to 64 states, lazy power iteration above. Throws
// PreconditionError with the component decomposition when reducible.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

double cylinder_mass(const MarkovMeasure& mu, const Word& w);

// H_k = H_mu(P^k) for k = 1..n over length-k cylinders (0 log 0 = 0), plus
// the ratios H_k/k. Enumeration of positive-mass words is capped at `budget`
// per call; beyond it the Markov closed form H_1 + (k-1) h is the sane route.
struct PartitionEntropyTable {
  std::vector<double> H;       // H[k-1] = H_k, nats
  std::vector<double> ratio;   // H_k / k
};
PartitionEntropyTable partition_entropy(const MarkovMeasure& mu, int n,
                                        std::size_t budget = 1'000'000);

// Kolmogorov-Sinai entropy: -sum_i p_i sum_j P_ij log P_ij.
double ks_entropy(const MarkovMeasure& mu);

// The finite-alphabet Bernoulli family with weight vector
// (1-a, a/n, ..., a/n), a = h / log n, on the full shift over {0..n}.
// `ambient_cutoff` >= n widens the ambient alphabet so that measures with
// different n stay comparable; -1 means n.
MarkovMeasure bernoulli_counterexample_measure(double h, long n, long ambient_cutoff = -1);

// Exact integral of a locally constant function: sum over positive-mass
// depth-d words of mass * value, in lexicographic order.
double integrate(const MarkovMeasure& mu, const LocallyConstantFn& f,
                 std::size_t budget = 1'000'000);

// h_mu + integral of phi d mu.
double free_energy(const MarkovMeasure& mu, const Potential& phi,
                   std::size_t budget = 1'000'000);

// Measure of maximal entropy of an irreducible finite graph, from Perron
// eigendata of the adjacency matrix.
MarkovMeasure parry_measure(TruncationPtr t);

// Equilibrium measure of a depth-1 potential on an irreducible finite graph:
// P_ij = M_ij r_j / (lambda r_i) for the weighted matrix M = diag(e^phi) A.
// Satisfies h + int phi = log lambda up to eigendata accuracy.
MarkovMeasure equilibrium_measure(TruncationPtr t, const Potential& phi);

}  // namespace melab

#endif  // MELAB_MEASURE_HPP
