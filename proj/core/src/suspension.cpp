#include "melab/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace melab {

FlowMeasure lift_measure(const MarkovMeasure& mu, const RoofFunction& tau,
                         std::size_t budget) {
  const double z = integrate(mu, tau.fn(), budget);
  if (!(z > 0.0) || !std::isfinite(z))
    throw PreconditionError("mean roof must be positive and finite");
  return FlowMeasure{mu, tau, z};
}

double kac_integral(const Potential& f, const FlowMeasure& nu, std::size_t budget) {
  if (f.depth() > nu.roof.depth())
    throw PreconditionError("potential depth exceeds the roof depth; refine the roof "
                            "to the common depth first");
  return integrate(nu.base, f.fn(), budget) / nu.mean_roof;
}

namespace {

// psi(u) = 3u^2 - 2u^3 is C^1 with psi(0)=0, psi(1)=1, psi'(0)=psi'(1)=0.
double psi_prime(double u) { return 6.0 * u - 6.0 * u * u; }

double simpson_fiber_integral(double f_w, double tau_w, int n) {
  // integrand g(t) = (f/tau) psi'(t/tau) on [0, tau]
  const double h = tau_w / static_cast<double>(n);
  double acc = 0.0;  // psi'(0) = psi'(1) = 0 endpoints
  for (int i = 1; i < n; ++i) {
    const double t = h * static_cast<double>(i);
    acc += (i % 2 == 1 ? 4.0 : 2.0) * psi_prime(t / tau_w);
  }
  return (f_w / tau_w) * acc * h / 3.0;
}

}  // namespace

BrwCheckResult brw_lift_check(const Truncation& t, const Potential& f,
                              const RoofFunction& tau, int quadrature_n) {
  if (quadrature_n < 8) throw PreconditionError("quadrature_n must be at least 8");
  if (quadrature_n % 2 != 0) throw PreconditionError("composite Simpson needs an even n");
  const int depth = std::max(f.depth(), tau.depth());
  BrwCheckResult res;
  const double eps = std::numeric_limits<double>::epsilon();
  for_admissible_words(t, depth, [&](std::span<const int> w) {
    const double fw = f(w);
    const double tw = tau(w);
    const double quad = simpson_fiber_integral(fw, tw, quadrature_n);
    res.max_error = std::max(res.max_error, std::abs(quad - fw));
    // psi' is a quadratic, so the h^4 Simpson term vanishes; what remains is
    // the rounding of ~n accumulations.
    res.bound = std::max(res.bound,
                         64.0 * static_cast<double>(quadrature_n + 1) * eps *
                             std::max(std::abs(fw), 1.0));
    ++res.words_checked;
    return true;
  });
  return res;
}

double abramov_entropy(const FlowMeasure& nu) {
  if (!nu.base.ergodic())
    throw PreconditionError("Abramov entropy requires an ergodic base");
  return ks_entropy(nu.base) / nu.mean_roof;
}

FlowUscReport flow_usc_check(const std::vector<FlowMeasure>& seq, const FlowMeasure& nu,
                             double tol, int ws_depth, double ws_tol) {
  if (seq.size() < 3) throw PreconditionError("sequence must have length >= 3");
  if (tol <= 0) throw PreconditionError("tolerance must be positive");
  for (const auto& m : seq)
    if (!(m.roof == nu.roof))
      throw PreconditionError("mixed roof functions are unsupported");
  FlowUscReport rep;
  rep.tol = tol;
  std::vector<MarkovMeasure> bases;
  bases.reserve(seq.size());
  for (const auto& m : seq) {
    if (!m.base.ergodic())
      throw PreconditionError("flow sequence member has a non-ergodic base");
    bases.push_back(m.base);
    rep.mean_roofs.push_back(m.mean_roof);
    rep.flow_entropies.push_back(abramov_entropy(m));
  }
  if (!nu.base.ergodic())
    throw PreconditionError("flow limit has a non-ergodic base");
  rep.limit_entropy = abramov_entropy(nu);
  rep.base_convergence = check_weakstar_limit(bases, nu.base, ws_depth, ws_tol);
  const double z_gap = std::abs(rep.mean_roofs.back() - nu.mean_roof);
  rep.mean_roofs_converge = z_gap < std::max(ws_tol, ws_tol * std::abs(nu.mean_roof));
  if (rep.base_convergence.verdict != WsVerdict::converges || !rep.mean_roofs_converge) {
    rep.verdict = UscVerdict::not_applicable;
    return rep;
  }
  const std::size_t L = seq.size();
  const std::size_t tail_start = L - (L + 2) / 3;
  rep.tail_max_entropy = rep.flow_entropies[tail_start];
  int arg = static_cast<int>(tail_start);
  for (std::size_t i = tail_start; i < L; ++i) {
    if (rep.flow_entropies[i] > rep.tail_max_entropy) {
      rep.tail_max_entropy = rep.flow_entropies[i];
      arg = static_cast<int>(i);
    }
  }
  if (rep.tail_max_entropy <= rep.limit_entropy + tol) {
    rep.verdict = UscVerdict::usc_holds;
  } else {
    rep.verdict = UscVerdict::usc_violated;
    rep.witness = arg;
  }
  return rep;
}

}  // namespace melab
