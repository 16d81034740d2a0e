#ifndef MELAB_SUSPENSION_HPP
#define MELAB_SUSPENSION_HPP

#include "melab/measure.hpp"
#include "melab/weakstar.hpp"

namespace melab {

// A suspension-flow invariant measure: base measure, locally constant roof,
// and the normalization Z = int tau d mu of the product measure on the
// region under the roof.
struct FlowMeasure {
  MarkovMeasure base;
  RoofFunction roof;
  double mean_roof = 0.0;  // Z
};

FlowMeasure lift_measure(const MarkovMeasure& mu, const RoofFunction& tau,
                         std::size_t budget = 1'000'000);

// Flow integral of any function whose fiber integral is f: (int f d mu) / Z.
// Requires f.depth() <= roof depth; refine the roof first otherwise.
double kac_integral(const Potential& f, const FlowMeasure& nu,
                    std::size_t budget = 1'000'000);

// Per-word check of the fiber-integral lift F(x,t) = (f(x)/tau(x)) psi'(t/tau(x))
// with psi(u) = 3u^2 - 2u^3: composite Simpson quadrature of int_0^tau F dt
// against f(w). psi' is a quadratic, so Simpson is exact and the documented
// bound is pure rounding: 64 * (n+1) * eps * max(|f|, 1).
struct BrwCheckResult {
  double max_error = 0.0;
  double bound = 0.0;
  int words_checked = 0;
};
BrwCheckResult brw_lift_check(const Truncation& t, const Potential& f,
                              const RoofFunction& tau, int quadrature_n);

// Flow entropy h_mu(sigma) / Z for ergodic bases.
double abramov_entropy(const FlowMeasure& nu);

struct FlowUscReport {
  UscVerdict verdict = UscVerdict::not_applicable;
  int witness = -1;
  double tail_max_entropy = 0.0;
  double limit_entropy = 0.0;
  double tol = 0.0;
  bool mean_roofs_converge = false;
  std::vector<double> flow_entropies;
  std::vector<double> mean_roofs;
  ConvergenceReport base_convergence;
};

// Flow-level upper semi-continuity: all measures must share the roof and
// have ergodic bases. Convergence of the flow measures is certified through
// the base weak* check plus convergence of the mean roofs.
FlowUscReport flow_usc_check(const std::vector<FlowMeasure>& seq, const FlowMeasure& nu,
                             double tol, int ws_depth = 3, double ws_tol = 1e-6);

}  // namespace melab

#endif  // MELAB_SUSPENSION_HPP
