#include "melab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "melab/entropy.hpp"

namespace melab {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr int kDenseSolveLimit = 64;

// Kahan-compensated accumulator for the long sums in entropies and integrals.
struct Accumulator {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::vector<std::vector<int>> positive_pattern(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (P(i, j) > 0.0) adj[static_cast<std::size_t>(i)].push_back(j);
  return adj;
}

bool pattern_strongly_connected(const Eigen::MatrixXd& P) {
  return Truncation::make(static_cast<int>(P.rows()), positive_pattern(P))->scc().size() == 1;
}

void check_rows_stochastic(const Eigen::MatrixXd& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if ((P.row(i).array() < 0.0).any())
      throw PreconditionError("transition matrix has a negative entry in row " +
                              std::to_string(i));
    if (std::abs(P.row(i).sum() - 1.0) > kStochasticTol)
      throw PreconditionError("row " + std::to_string(i) +
                              " of the transition matrix does not sum to 1");
  }
}

bool is_contiguous(const std::vector<int>& support) {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] != static_cast<int>(i)) return false;
  return true;
}

}  // namespace

const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::markov: return "markov";
    case MeasureKind::bernoulli: return "bernoulli";
    case MeasureKind::dirac_periodic: return "dirac";
  }
  return "?";
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0)
    throw PreconditionError("transition matrix must be square and nonempty");
  check_rows_stochastic(P);
  const auto comps = Truncation::make(static_cast<int>(P.rows()), positive_pattern(P))->scc();
  if (comps.size() != 1) {
    std::ostringstream os;
    os << "reducible support, no unique stationary vector; components:";
    for (const auto& c : comps) {
      os << " {";
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
      os << "}";
    }
    throw PreconditionError(os.str());
  }
  const Eigen::Index n = P.rows();
  Eigen::VectorXd p;
  if (n <= kDenseSolveLimit) {
    // Solve p(P - I) = 0 with the first equation replaced by sum(p) = 1.
    Eigen::MatrixXd M = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    M.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    p = M.partialPivLu().solve(rhs);
  } else {
    // Lazy chain (P+I)/2 shares the stationary vector and is aperiodic.
    p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd L = 0.5 * (P + Eigen::MatrixXd::Identity(n, n));
    for (long it = 0; it < 1'000'000; ++it) {
      Eigen::VectorXd next = (p.transpose() * L).transpose();
      next /= next.sum();
      const double delta = (next - p).lpNorm<Eigen::Infinity>();
      p = next;
      if (delta < 1e-15) break;
      if (it + 1 == 1'000'000)
        throw NumericalError("stationary power iteration failed to converge");
    }
  }
  p = p.cwiseMax(0.0);
  p /= p.sum();
  const double residual = ((p.transpose() * P).transpose() - p).lpNorm<Eigen::Infinity>();
  if (residual > kStochasticTol)
    throw NumericalError("stationary vector residual " + std::to_string(residual));
  return p;
}

int MarkovMeasure::local_index(int vertex) const {
  if (contiguous_)
    return vertex >= 0 && vertex < support_size() ? vertex : -1;
  auto it = std::lower_bound(support_.begin(), support_.end(), vertex);
  if (it == support_.end() || *it != vertex) return -1;
  return static_cast<int>(it - support_.begin());
}

double MarkovMeasure::trans(int local_i, int local_j) const {
  if (kind_ == MeasureKind::bernoulli) return q_[static_cast<std::size_t>(local_j)];
  return P_(local_i, local_j);
}

const std::vector<double>& MarkovMeasure::weights() const {
  if (kind_ != MeasureKind::bernoulli)
    throw PreconditionError("weights() is only valid for Bernoulli measures");
  return q_;
}

const Eigen::MatrixXd& MarkovMeasure::transition_matrix() const {
  if (kind_ == MeasureKind::bernoulli)
    throw PreconditionError("Bernoulli measures store no dense transition matrix");
  return P_;
}

double MarkovMeasure::mass(std::span<const int> word) const {
  if (word.empty()) throw PreconditionError("empty word");
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (!ambient_->edge(word[i], word[i + 1]))
      throw PreconditionError("inadmissible word " +
                              to_string(Word(std::vector<int>(word.begin(), word.end()))));
  ambient_->check_vertex(word.front());
  int li = local_index(word.front());
  if (li < 0) return 0.0;
  double m = pi_[static_cast<std::size_t>(li)];
  for (std::size_t i = 1; i < word.size() && m > 0.0; ++i) {
    const int lj = local_index(word[i]);
    if (lj < 0) return 0.0;
    m *= trans(li, lj);
    li = lj;
  }
  return m;
}

void MarkovMeasure::for_positive_successors(int local_i,
                                            const std::function<bool(int)>& f) const {
  const int m = support_size();
  if (kind_ == MeasureKind::bernoulli) {
    for (int j = 0; j < m; ++j)
      if (q_[static_cast<std::size_t>(j)] > 0.0 && !f(j)) return;
    return;
  }
  for (int j = 0; j < m; ++j)
    if (P_(local_i, j) > 0.0 && !f(j)) return;
}

bool MarkovMeasure::compatible_with(const MarkovMeasure& o) const {
  return ambient_ == o.ambient_ || ambient_->structurally_equal(*o.ambient_);
}

MarkovMeasure MarkovMeasure::markov(TruncationPtr ambient, std::vector<int> support,
                                    Eigen::MatrixXd P,
                                    std::optional<Eigen::VectorXd> stationary) {
  if (!ambient) throw PreconditionError("null ambient truncation");
  if (support.empty()) throw PreconditionError("empty support");
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    throw PreconditionError("duplicate support vertex");
  for (int v : support) ambient->check_vertex(v);
  const int m = static_cast<int>(support.size());
  if (P.rows() != m || P.cols() != m)
    throw PreconditionError("transition matrix shape does not match support");
  check_rows_stochastic(P);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (P(i, j) > 0.0 && !ambient->edge(support[static_cast<std::size_t>(i)],
                                          support[static_cast<std::size_t>(j)]))
        throw PreconditionError("positive transition on a forbidden edge (" +
                                std::to_string(support[static_cast<std::size_t>(i)]) + "," +
                                std::to_string(support[static_cast<std::size_t>(j)]) + ")");
  MarkovMeasure mu;
  mu.ambient_ = std::move(ambient);
  mu.kind_ = MeasureKind::markov;
  Eigen::VectorXd p;
  if (stationary) {
    p = *stationary;
    if (p.size() != m) throw PreconditionError("stationary vector size mismatch");
    if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > kStochasticTol)
      throw PreconditionError("stationary vector is not a probability vector");
    const double residual = ((p.transpose() * P).transpose() - p).lpNorm<Eigen::Infinity>();
    if (residual > kStochasticTol)
      throw PreconditionError("supplied vector is not stationary (residual " +
                              std::to_string(residual) + ")");
  } else {
    p = stationary_distribution(P);
  }
  mu.ergodic_ = pattern_strongly_connected(P);
  mu.support_ = std::move(support);
  mu.contiguous_ = is_contiguous(mu.support_);
  mu.P_ = std::move(P);
  mu.pi_.assign(p.data(), p.data() + p.size());
  return mu;
}

MarkovMeasure MarkovMeasure::bernoulli(TruncationPtr ambient, std::vector<int> support,
                                       std::vector<double> weights) {
  if (!ambient) throw PreconditionError("null ambient truncation");
  if (support.empty() || support.size() != weights.size())
    throw PreconditionError("support and weight vector sizes differ");
  // Keep support/weights paired under the sort.
  std::vector<std::size_t> order(support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  std::vector<int> s(support.size());
  std::vector<double> q(weights.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s[i] = support[order[i]];
    q[i] = weights[order[i]];
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] == s[i + 1]) throw PreconditionError("duplicate support vertex");
  Accumulator total;
  for (double w : q) {
    if (w < 0.0) throw PreconditionError("negative Bernoulli weight");
    total.add(w);
  }
  if (std::abs(total.sum - 1.0) > kStochasticTol)
    throw PreconditionError("Bernoulli weights do not sum to 1");
  for (int v : s) ambient->check_vertex(v);
  // Every pair with positive weight must be an allowed transition.
  if (!ambient->complete()) {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (q[i] > 0.0 && q[j] > 0.0 && !ambient->edge(s[i], s[j]))
          throw PreconditionError("Bernoulli support uses a forbidden edge");
  }
  MarkovMeasure mu;
  mu.ambient_ = std::move(ambient);
  mu.kind_ = MeasureKind::bernoulli;
  mu.support_ = std::move(s);
  mu.contiguous_ = is_contiguous(mu.support_);
  mu.pi_ = q;
  mu.q_ = std::move(q);
  // The positive-weight subgraph is complete, hence strongly connected.
  mu.ergodic_ = true;
  return mu;
}

MarkovMeasure MarkovMeasure::dirac_periodic(TruncationPtr ambient, std::vector<int> orbit) {
  if (!ambient) throw PreconditionError("null ambient truncation");
  if (orbit.empty()) throw PreconditionError("empty orbit");
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const int from = orbit[i];
    const int to = orbit[(i + 1) % orbit.size()];
    if (!ambient->edge(from, to))
      throw PreconditionError("orbit uses a forbidden edge (" + std::to_string(from) +
                              "," + std::to_string(to) + ")");
  }
  std::vector<int> support = orbit;
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    throw PreconditionError("orbit revisits a vertex before closing");
  const int m = static_cast<int>(orbit.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  auto local = [&](int v) {
    return static_cast<int>(std::lower_bound(support.begin(), support.end(), v) -
                            support.begin());
  };
  for (std::size_t i = 0; i < orbit.size(); ++i)
    P(local(orbit[i]), local(orbit[(i + 1) % orbit.size()])) = 1.0;
  MarkovMeasure mu;
  mu.ambient_ = std::move(ambient);
  mu.kind_ = MeasureKind::dirac_periodic;
  mu.support_ = std::move(support);
  mu.contiguous_ = is_contiguous(mu.support_);
  mu.P_ = std::move(P);
  mu.pi_.assign(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
  mu.ergodic_ = true;
  return mu;
}

double cylinder_mass(const MarkovMeasure& mu, const Word& w) {
  if (!is_admissible(*mu.ambient(), w))
    throw PreconditionError("inadmissible word " + to_string(w));
  return mu.mass(w);
}

namespace {

// DFS over positive-mass words in lexicographic order of support-local
// states, accumulating -m log m at each depth.
void entropy_dfs(const MarkovMeasure& mu, int n, std::size_t budget,
                 std::vector<Accumulator>& acc) {
  std::size_t visited = 0;
  std::function<void(int, double, int)> go = [&](int local, double m, int depth) {
    if (++visited > budget)
      throw PreconditionError(
          "cylinder enumeration exceeds the budget of " + std::to_string(budget) +
          " words; use the Markov closed form H_1 + (n-1) h for deep tables");
    acc[static_cast<std::size_t>(depth) - 1].add(-xlogx(m));
    if (depth == n) return;
    mu.for_positive_successors(local, [&](int j) {
      go(j, m * mu.trans(local, j), depth + 1);
      return true;
    });
  };
  for (int i = 0; i < mu.support_size(); ++i)
    if (mu.stationary(i) > 0.0) go(i, mu.stationary(i), 1);
}

}  // namespace

PartitionEntropyTable partition_entropy(const MarkovMeasure& mu, int n,
                                        std::size_t budget) {
  if (n < 1) throw PreconditionError("depth must be positive");
  std::vector<Accumulator> acc(static_cast<std::size_t>(n));
  entropy_dfs(mu, n, budget, acc);
  PartitionEntropyTable table;
  table.H.reserve(static_cast<std::size_t>(n));
  table.ratio.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double H = acc[static_cast<std::size_t>(k) - 1].sum;
    table.H.push_back(H);
    table.ratio.push_back(H / static_cast<double>(k));
  }
  return table;
}

double ks_entropy(const MarkovMeasure& mu) {
  Accumulator acc;
  if (mu.kind() == MeasureKind::bernoulli) {
    for (double w : mu.weights()) acc.add(-xlogx(w));
    return acc.sum;
  }
  const Eigen::MatrixXd& P = mu.transition_matrix();
  for (int i = 0; i < mu.support_size(); ++i) {
    const double pi = mu.stationary(i);
    if (pi <= 0.0) continue;
    for (int j = 0; j < mu.support_size(); ++j) acc.add(-pi * xlogx(P(i, j)));
  }
  return acc.sum;
}

MarkovMeasure bernoulli_counterexample_measure(double h, long n, long ambient_cutoff) {
  if (!(h > 0.0)) throw PreconditionError("h must be positive");
  if (n <= 1) throw PreconditionError("n must exceed 1");
  const double a = h / std::log(static_cast<double>(n));
  if (a >= 1.0)
    throw PreconditionError("h/log n = " + std::to_string(a) +
                            " >= 1: n too small for the given h");
  const long cutoff = ambient_cutoff < 0 ? n : ambient_cutoff;
  if (cutoff < n) throw PreconditionError("ambient cutoff below n");
  TruncationPtr ambient =
      ShiftSpec::full_shift_rule(static_cast<int>(cutoff)).full_truncation();
  std::vector<int> support(static_cast<std::size_t>(n) + 1);
  std::vector<double> q(static_cast<std::size_t>(n) + 1, a / static_cast<double>(n));
  for (long i = 0; i <= n; ++i) support[static_cast<std::size_t>(i)] = static_cast<int>(i);
  q[0] = 1.0 - a;
  return MarkovMeasure::bernoulli(std::move(ambient), std::move(support), std::move(q));
}

double integrate(const MarkovMeasure& mu, const LocallyConstantFn& f, std::size_t budget) {
  const int d = f.depth();
  Accumulator acc;
  std::size_t visited = 0;
  std::vector<int> word(static_cast<std::size_t>(d));
  std::function<void(int, double, int)> go = [&](int local, double m, int depth) {
    if (++visited > budget)
      throw PreconditionError("integration enumeration exceeds budget");
    word[static_cast<std::size_t>(depth) - 1] = mu.support()[static_cast<std::size_t>(local)];
    if (depth == d) {
      acc.add(m * f(std::span<const int>(word)));
      return;
    }
    mu.for_positive_successors(local, [&](int j) {
      go(j, m * mu.trans(local, j), depth + 1);
      return true;
    });
  };
  for (int i = 0; i < mu.support_size(); ++i)
    if (mu.stationary(i) > 0.0) go(i, mu.stationary(i), 1);
  return acc.sum;
}

double free_energy(const MarkovMeasure& mu, const Potential& phi, std::size_t budget) {
  return ks_entropy(mu) + integrate(mu, phi.fn(), budget);
}

namespace {

MarkovMeasure measure_from_eigendata(TruncationPtr t, const Eigen::MatrixXd& M) {
  if (!is_transitive(*t))
    throw PreconditionError("Perron construction requires a strongly connected graph");
  const auto [lambda, r] = perron_eigen(M);
  if (!(lambda > 0.0)) throw NumericalError("nonpositive Perron root");
  const int n = t->size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (M(i, j) > 0.0) P(i, j) = M(i, j) * r(j) / (lambda * r(i));
    const double s = P.row(i).sum();
    P.row(i) /= s;  // exact row normalization
  }
  std::vector<int> support(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) support[static_cast<std::size_t>(i)] = i;
  return MarkovMeasure::markov(std::move(t), std::move(support), std::move(P));
}

}  // namespace

MarkovMeasure parry_measure(TruncationPtr t) {
  const Eigen::MatrixXd A = adjacency_matrix(*t);
  return measure_from_eigendata(std::move(t), A);
}

MarkovMeasure equilibrium_measure(TruncationPtr t, const Potential& phi) {
  if (phi.depth() != 1)
    throw PreconditionError("equilibrium construction implemented for depth-1 potentials");
  const Eigen::MatrixXd M = weighted_transfer_matrix(*t, phi);
  return measure_from_eigendata(std::move(t), M);
}

}  // namespace melab
