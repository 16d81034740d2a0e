#include "melab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace melab {

namespace {

constexpr double kEntropyCapNats = 50.0;

// Power iteration on an irreducible nonnegative matrix made aperiodic by the
// +I shift. Returns (rho(A), right Perron vector), rho from the Rayleigh
// quotient of A+I minus one.
std::pair<double, Eigen::VectorXd> perron_shifted(const Eigen::MatrixXd& A,
                                                  const PowerIterationOptions& opts) {
  const Eigen::Index n = A.rows();
  if (n == 1) return {A(0, 0), Eigen::VectorXd::Ones(1)};
  Eigen::MatrixXd B = A + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double q_prev = 0.0;
  for (long it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd y = B * x;
    const double q = x.dot(y) / x.dot(x);
    const double norm = y.lpNorm<Eigen::Infinity>();
    if (norm == 0.0) return {0.0, x};  // no outgoing weight at all
    x = y / norm;
    if (it > 0 && std::abs(q - q_prev) < opts.tol) {
      // Two more sweeps tighten the eigenvector before reporting.
      for (int extra = 0; extra < 2; ++extra) {
        y = B * x;
        x = y / y.lpNorm<Eigen::Infinity>();
      }
      const double rho = x.dot(B * x) / x.dot(x) - 1.0;
      return {rho, x};
    }
    q_prev = q;
  }
  throw NumericalError("power iteration failed to converge within budget");
}

std::vector<std::vector<int>> positivity_scc(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A(i, j) > 0.0) adj[static_cast<std::size_t>(i)].push_back(j);
  return Truncation::make(n, std::move(adj))->scc();
}

void finalize(EntropyEstimate& e, double tol) {
  e.tolerance = tol;
  if (e.diagnostics.size() >= 2) {
    const double last = e.diagnostics[e.diagnostics.size() - 1].second;
    const double prev = e.diagnostics[e.diagnostics.size() - 2].second;
    e.converged = std::abs(last - prev) < tol;
  } else {
    e.converged = false;
  }
  if (!e.diagnostics.empty()) e.value = e.diagnostics.back().second;
}

}  // namespace

const char* to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::periodic_orbit: return "periodic_orbit";
    case EntropyMethod::truncation_spectral: return "truncation_spectral";
    case EntropyMethod::loop_renewal: return "loop_renewal";
  }
  return "?";
}

double log_big(const BigInt& z) {
  if (z <= 0) throw PreconditionError("log of nonpositive integer");
  const std::size_t bits = boost::multiprecision::msb(z) + 1;
  if (bits <= 1000) return std::log(z.convert_to<double>());
  const std::size_t shift = bits - 64;
  BigInt top = z;
  top >>= shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double spectral_radius(const Eigen::MatrixXd& A, const PowerIterationOptions& opts) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw PreconditionError("spectral radius needs a nonempty square matrix");
  if ((A.array() < 0.0).any())
    throw PreconditionError("spectral radius expects a nonnegative matrix");
  double rho = 0.0;
  for (const auto& comp : positivity_scc(A)) {
    if (comp.size() == 1) {
      const int v = comp[0];
      rho = std::max(rho, A(v, v));
      continue;
    }
    Eigen::MatrixXd sub(comp.size(), comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j)
        sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            A(comp[i], comp[j]);
    rho = std::max(rho, perron_shifted(sub, opts).first);
  }
  return rho;
}

std::pair<double, Eigen::VectorXd> perron_eigen(const Eigen::MatrixXd& A,
                                                const PowerIterationOptions& opts) {
  if (positivity_scc(A).size() != 1)
    throw PreconditionError("perron_eigen requires an irreducible matrix");
  PowerIterationOptions tight = opts;
  tight.tol = std::min(opts.tol, 1e-15);
  return perron_shifted(A, tight);
}

namespace {

// Power iteration on (A|_C + I) through adjacency lists.
double component_radius_sparse(const Truncation& t, const std::vector<int>& comp,
                               const PowerIterationOptions& opts) {
  if (comp.size() == 1) return t.edge(comp[0], comp[0]) ? 1.0 : 0.0;
  const int m = static_cast<int>(comp.size());
  std::vector<int> local(static_cast<std::size_t>(t.size()), -1);
  for (int i = 0; i < m; ++i) local[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = i;
  std::vector<double> x(static_cast<std::size_t>(m), 1.0), y(static_cast<std::size_t>(m));
  double q_prev = 0.0;
  for (long it = 0; it < opts.max_iterations; ++it) {
    double dot_xy = 0.0, dot_xx = 0.0, norm = 0.0;
    for (int i = 0; i < m; ++i) {
      double acc = x[static_cast<std::size_t>(i)];
      for (int j : t.neighbors(comp[static_cast<std::size_t>(i)])) {
        const int lj = local[static_cast<std::size_t>(j)];
        if (lj >= 0) acc += x[static_cast<std::size_t>(lj)];
      }
      y[static_cast<std::size_t>(i)] = acc;
      dot_xy += x[static_cast<std::size_t>(i)] * acc;
      dot_xx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      norm = std::max(norm, std::abs(acc));
    }
    const double q = dot_xy / dot_xx;
    for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / norm;
    if (it > 0 && std::abs(q - q_prev) < opts.tol) return q - 1.0;
    q_prev = q;
  }
  throw NumericalError("power iteration failed to converge within budget");
}

}  // namespace

double spectral_radius(const Truncation& t, const PowerIterationOptions& opts) {
  if (!t.materialized())
    return static_cast<double>(t.size());  // complete graph
  double rho = 0.0;
  for (const auto& comp : t.scc())
    rho = std::max(rho, component_radius_sparse(t, comp, opts));
  return rho;
}

std::vector<double> component_log_radii(const Truncation& t,
                                        const PowerIterationOptions& opts) {
  std::vector<double> out;
  if (!t.materialized()) {
    out.push_back(std::log(static_cast<double>(t.size())));
    return out;
  }
  for (const auto& comp : t.scc()) {
    const double rho = component_radius_sparse(t, comp, opts);
    out.push_back(rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity());
  }
  return out;
}

Eigen::MatrixXd adjacency_matrix(const Truncation& t) {
  const int n = t.size();
  if (!t.materialized() && !t.complete())
    throw PreconditionError("truncation not materialized");
  if (t.complete() && !t.materialized())
    throw PreconditionError("truncation too large for a dense matrix");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : t.neighbors(i)) A(i, j) = 1.0;
  return A;
}

Eigen::MatrixXd weighted_transfer_matrix(const Truncation& t, const Potential& phi) {
  if (!phi.fn().defined_on(t))
    throw PreconditionError("potential not defined on every admissible word");
  const int d = phi.depth();
  if (d == 1) {
    const int n = t.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const int one[] = {i};
      const double w = std::exp(phi(std::span<const int>(one)));
      for (int j : t.neighbors(i)) M(i, j) = w;
    }
    return M;
  }
  // States are admissible words of length d-1; transitions overlap in d-2
  // symbols and carry the weight of the concatenated depth-d word.
  const auto states = admissible_words(t, d - 1);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < states.size(); ++i)
    index[states[i]] = static_cast<int>(i);
  const int m = static_cast<int>(states.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> word(static_cast<std::size_t>(d));
  for (int i = 0; i < m; ++i) {
    const auto& u = states[static_cast<std::size_t>(i)];
    std::copy(u.begin(), u.end(), word.begin());
    t.for_neighbors(u.back(), [&](int j) {
      word[static_cast<std::size_t>(d) - 1] = j;
      std::vector<int> v(word.begin() + 1, word.end());
      auto it = index.find(v);
      if (it != index.end())
        M(i, it->second) = std::exp(phi(std::span<const int>(word)));
      return true;
    });
  }
  return M;
}

EntropyEstimate gurevich_entropy_periodic(const Truncation& t, int a, int n_max,
                                          double tol) {
  if (n_max < 1) throw PreconditionError("n_max must be positive");
  EntropyEstimate e;
  e.method = EntropyMethod::periodic_orbit;
  const auto z = loops_at_sequence(t, a, n_max);
  for (int n = 1; n <= n_max; ++n) {
    const BigInt& zn = z[static_cast<std::size_t>(n) - 1];
    if (zn == 0) continue;
    e.diagnostics.emplace_back(n, log_big(zn) / static_cast<double>(n));
  }
  if (e.diagnostics.empty())
    throw PreconditionError("vertex " + std::to_string(a) +
                            " lies on no loop of length <= " + std::to_string(n_max));
  finalize(e, tol);
  return e;
}

EntropyEstimate gurevich_entropy_periodic(const ShiftSpec& spec, int a, int n_max,
                                          double tol) {
  return gurevich_entropy_periodic(*spec.full_truncation(), a, n_max, tol);
}

EntropyEstimate gurevich_entropy_truncation(const ShiftSpec& spec, int k_max, double tol) {
  if (k_max < 0) throw PreconditionError("k_max must be nonnegative");
  if (tol <= 0) throw PreconditionError("tolerance must be positive");
  EntropyEstimate e;
  e.method = EntropyMethod::truncation_spectral;
  for (int k = 0; k <= k_max; ++k) {
    TruncationPtr t = spec.truncate(k);
    const double rho = spectral_radius(*t);
    e.diagnostics.emplace_back(k, rho > 0.0
                                       ? std::log(rho)
                                       : -std::numeric_limits<double>::infinity());
    if (spec.kind() == SpecKind::finite_graph && k >= 1) break;  // constant exhaustion
    if (spec.kind() == SpecKind::loop_counts && k > spec.cutoff()) break;  // stabilized
  }
  finalize(e, tol);
  // Increments that fail to at least halve over the last three partials
  // signal an exhaustion whose spectral radii keep climbing.
  const auto& d = e.diagnostics;
  if (!e.converged && d.size() >= 3) {
    const double inc1 = d[d.size() - 1].second - d[d.size() - 2].second;
    const double inc2 = d[d.size() - 2].second - d[d.size() - 3].second;
    if (inc1 > 0.5 * inc2) e.infinite_entropy_suspected = true;
  }
  return e;
}

namespace {

EntropyEstimate renewal_root(const std::vector<long double>& coeff, double tol) {
  // f(x) = sum_m c_m x^m - 1 is strictly increasing on (0,1); bisect on
  // (e^{-H_max}, 1-eps). Long-double Horner keeps huge counts in range.
  EntropyEstimate e;
  e.method = EntropyMethod::loop_renewal;
  bool any = false;
  for (long double c : coeff) any = any || c > 0;
  if (!any) throw PreconditionError("all loop counts are zero");
  const auto f = [&](long double x) -> long double {
    long double acc = 0.0L;
    for (std::size_t m = coeff.size(); m-- > 0;) acc = acc * x + coeff[m];
    return acc * x - 1.0L;
  };
  long double lo = std::exp(-kEntropyCapNats);
  long double hi = 1.0L - 1e-12L;
  if (f(lo) > 0.0L)
    throw PreconditionError("loop counts imply entropy above the cap of 50 nats");
  if (f(hi) < 0.0L) {
    // Generating function never reaches 1 below x = 1: entropy 0.
    e.boundary_no_root = true;
    e.diagnostics.emplace_back(0, 0.0);
    e.diagnostics.emplace_back(1, 0.0);
    finalize(e, tol);
    return e;
  }
  int iter = 0;
  for (; iter < 200; ++iter) {
    const long double mid = 0.5L * (lo + hi);
    if (f(mid) >= 0.0L)
      hi = mid;
    else
      lo = mid;
    if ((iter & 15) == 0)
      e.diagnostics.emplace_back(iter, -static_cast<double>(std::log(0.5L * (lo + hi))));
    if (static_cast<double>(hi - lo) < 1e-17) break;
  }
  e.diagnostics.emplace_back(iter, -static_cast<double>(std::log(0.5L * (lo + hi))));
  finalize(e, tol);
  return e;
}

}  // namespace

EntropyEstimate loop_system_entropy(const std::vector<BigInt>& counts_by_length,
                                    double tol) {
  std::vector<long double> coeff;
  coeff.reserve(counts_by_length.size());
  for (const BigInt& c : counts_by_length) {
    if (c < 0) throw PreconditionError("negative loop count");
    coeff.push_back(c.convert_to<long double>());
  }
  return renewal_root(coeff, tol);
}

EntropyEstimate loop_system_entropy(const std::vector<std::uint64_t>& counts_by_length,
                                    double tol) {
  std::vector<long double> coeff(counts_by_length.begin(), counts_by_length.end());
  return renewal_root(coeff, tol);
}

EntropyEstimate loop_system_entropy(const ShiftSpec& loop_spec, int cutoff, double tol) {
  if (loop_spec.kind() != SpecKind::loop_counts)
    throw PreconditionError("loop_system_entropy needs a loop-counts spec");
  if (!loop_spec.finite_entropy_flag())
    throw PreconditionError("loop counts fail the finite-entropy growth bound");
  const auto& counts = loop_spec.counts();
  if (cutoff < static_cast<int>(counts.size()))
    throw PreconditionError("cutoff below the declared support of the counts");
  return loop_system_entropy(std::vector<std::uint64_t>(counts.begin(), counts.end()), tol);
}

EntropyEstimate gurevich_pressure(const ShiftSpec& spec, const Potential& phi,
                                  int k_max, double tol) {
  if (k_max < 0) throw PreconditionError("k_max must be nonnegative");
  EntropyEstimate e;
  e.method = EntropyMethod::truncation_spectral;
  for (int k = 0; k <= k_max; ++k) {
    TruncationPtr t = spec.truncate(k);
    if (t->complete() && !t->materialized())
      throw PreconditionError("pressure truncation too large for a dense matrix");
    const double rho = spectral_radius(weighted_transfer_matrix(*t, phi));
    e.diagnostics.emplace_back(k, rho > 0.0 ? std::log(rho)
                                            : -std::numeric_limits<double>::infinity());
    if (spec.kind() == SpecKind::finite_graph && k >= 1) break;
  }
  finalize(e, tol);
  return e;
}

}  // namespace melab
