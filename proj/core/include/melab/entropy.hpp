#ifndef MELAB_ENTROPY_HPP
#define MELAB_ENTROPY_HPP

#include <Eigen/Dense>

#include "melab/potential.hpp"
#include "melab/shift.hpp"

namespace melab {

enum class EntropyMethod { periodic_orbit, truncation_spectral, loop_renewal };

const char* to_string(EntropyMethod m);

// One estimate with its convergence diagnostics. Partial estimates are
// recorded verbatim, no smoothing; `converged` is set only when the last two
// partials differ by less than `tolerance`.
struct EntropyEstimate {
  double value = 0.0;
  EntropyMethod method = EntropyMethod::truncation_spectral;
  std::vector<std::pair<int, double>> diagnostics;  // (index, partial)
  bool converged = false;
  double tolerance = 0.0;
  // Truncation estimator: increments stopped shrinking.
  bool infinite_entropy_suspected = false;
  // Renewal solver: generating function stays below 1 on (0,1); entropy 0.
  bool boundary_no_root = false;
};

struct PowerIterationOptions {
  double tol = 1e-13;          // Rayleigh-quotient convergence threshold
  long max_iterations = 1'000'000;
};

// Spectral radius of a nonnegative matrix: the maximum over strongly
// connected components of the Perron root, each computed by power iteration
// on A+I (the shift makes periodic components aperiodic without moving the
// Perron vector) with the deterministic all-ones start. Throws
// NumericalError if the iteration budget is exhausted.
double spectral_radius(const Eigen::MatrixXd& A, const PowerIterationOptions& opts = {});

// Same computation on a 0/1 truncation through its adjacency lists; keeps
// large sparse graphs (realized loop systems) out of dense storage.
double spectral_radius(const Truncation& t, const PowerIterationOptions& opts = {});

// log Perron root per strongly connected component, aligned with t.scc().
// Single vertices without a self edge report -inf. Non-transitive
// truncations carry their entropy per component; the estimator value is the
// max.
std::vector<double> component_log_radii(const Truncation& t,
                                        const PowerIterationOptions& opts = {});

// Perron root with right eigenvector of an irreducible nonnegative matrix.
std::pair<double, Eigen::VectorXd> perron_eigen(const Eigen::MatrixXd& A,
                                                const PowerIterationOptions& opts = {});

Eigen::MatrixXd adjacency_matrix(const Truncation& t);

// Transfer matrix of a depth-d locally constant potential on a truncation:
// for d == 1 entry (i,j) = e^{phi(i)} when the edge is allowed; for d >= 2
// states are admissible words of length d-1 and transitions overlap in d-2
// symbols, weighted by e^{phi} of the concatenated depth-d word.
Eigen::MatrixXd weighted_transfer_matrix(const Truncation& t, const Potential& phi);

// (1/n) log Z_n(a) along n = 1..n_max, skipping indices with Z_n = 0.
EntropyEstimate gurevich_entropy_periodic(const Truncation& t, int a, int n_max,
                                          double tol = 1e-4);
EntropyEstimate gurevich_entropy_periodic(const ShiftSpec& spec, int a, int n_max,
                                          double tol = 1e-4);

// log spectral radius along the exhaustion k = 0..k_max; nondecreasing by
// subgraph monotonicity. Flags possible infinite entropy when the increments
// stop shrinking.
EntropyEstimate gurevich_entropy_truncation(const ShiftSpec& spec, int k_max, double tol);

// Entropy of a loop system with the given counts by loop length: -log x*
// where x* solves sum_m c_m x^m = 1 on (0,1), found by bisection. When the
// sum stays below 1 on the whole interval the entropy is 0 and
// boundary_no_root is set.
EntropyEstimate loop_system_entropy(const std::vector<BigInt>& counts_by_length,
                                    double tol);
EntropyEstimate loop_system_entropy(const std::vector<std::uint64_t>& counts_by_length,
                                    double tol);
EntropyEstimate loop_system_entropy(const ShiftSpec& loop_spec, int cutoff, double tol);

// Gurevich pressure of a locally constant potential: log spectral radius of
// the weighted transfer matrix along the exhaustion.
EntropyEstimate gurevich_pressure(const ShiftSpec& spec, const Potential& phi,
                                  int k_max, double tol);

// log of a positive big integer, accurate to double precision.
double log_big(const BigInt& z);

}  // namespace melab

#endif  // MELAB_ENTROPY_HPP
