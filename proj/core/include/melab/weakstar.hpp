#ifndef MELAB_WEAKSTAR_HPP
#define MELAB_WEAKSTAR_HPP

#include "melab/measure.hpp"

namespace melab {

enum class WsVerdict { converges, diverges, inconclusive };
enum class UscVerdict { usc_holds, usc_violated, not_applicable };

const char* to_string(WsVerdict v);
const char* to_string(UscVerdict v);

// Cylinder pseudometric at the given depth:
//   sum_{k<=d} 2^{-k} sum_{|w|=k} 2^{-rank(w)} |mu[w] - nu[w]|,
// rank(w) the lexicographic index of w among admissible words of length k.
// Terms beyond rank 60 sit below double resolution of the sum and are
// dropped, which keeps the metric computable on countable alphabets.
double cylinder_metric(const MarkovMeasure& mu, const MarkovMeasure& nu, int depth);

// sup_{|w|=k} |mu[w] - nu[w]| for k = 1..depth, by branch-and-bound over the
// prefix tree (a prefix bounds every extension's mass).
std::vector<double> sup_cylinder_deviations(const MarkovMeasure& mu,
                                            const MarkovMeasure& nu, int depth);

struct ConvergenceReport {
  int depth = 0;
  double tol = 0.0;
  std::pair<int, int> index_range{0, -1};  // inclusive sequence indices
  // per index: sup deviation per word length 1..depth
  std::vector<std::vector<double>> sup_devs;
  std::vector<double> sup_dev;  // per index: max over lengths <= depth
  std::vector<double> metric;   // per index: cylinder_metric against the limit
  WsVerdict verdict = WsVerdict::inconclusive;
};

// Portmanteau-style certification on cylinders (clopen, so boundary-free):
// converges when the final sup deviation is below tol and deviations are
// nonincreasing over the final third; diverges when some cylinder keeps a
// deviation >= tol in the tail without a downward trend; else inconclusive.
ConvergenceReport check_weakstar_limit(const std::vector<MarkovMeasure>& seq,
                                       const MarkovMeasure& mu, int depth, double tol);

struct UscReport {
  UscVerdict verdict = UscVerdict::not_applicable;
  int witness = -1;              // index attaining the violating entropy
  double tail_max_entropy = 0.0; // limsup proxy: max over the final third
  double limit_entropy = 0.0;
  double tol = 0.0;
  std::vector<double> entropies; // per index
  ConvergenceReport convergence;
};

// Upper semi-continuity check at a weak* limit: requires every measure to be
// ergodic; not_applicable when the convergence certificate fails;
// usc_violated when the tail entropy proxy exceeds the limit entropy by more
// than tol.
UscReport usc_check(const std::vector<MarkovMeasure>& seq, const MarkovMeasure& mu,
                    double tol, int ws_depth = 3, double ws_tol = 1e-6);

}  // namespace melab

#endif  // MELAB_WEAKSTAR_HPP
