#include "melab/weakstar.hpp"

#include <algorithm>
#include <cmath>

namespace melab {

namespace {

// 2^{-61} < eps relative to any nonzero leading term of the metric sum.
constexpr int kRankCap = 60;
constexpr double kMonotoneSlack = 1e-12;

void check_compatible(const MarkovMeasure& mu, const MarkovMeasure& nu) {
  if (!mu.compatible_with(nu))
    throw PreconditionError("measures live over incompatible spec truncations");
}

// Ambient-id successors with positive transition probability out of `v`,
// merged over both measures, ascending. Masses may be zero for one side.
void merged_successors(const MarkovMeasure& mu, int lmu, const MarkovMeasure& nu,
                       int lnu, std::vector<int>& out) {
  out.clear();
  std::size_t mark = 0;
  if (lmu >= 0)
    mu.for_positive_successors(lmu, [&](int j) {
      out.push_back(mu.support()[static_cast<std::size_t>(j)]);
      return true;
    });
  mark = out.size();
  if (lnu >= 0)
    nu.for_positive_successors(lnu, [&](int j) {
      out.push_back(nu.support()[static_cast<std::size_t>(j)]);
      return true;
    });
  std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(mark), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

void merged_roots(const MarkovMeasure& mu, const MarkovMeasure& nu, std::vector<int>& out) {
  out.clear();
  for (int i = 0; i < mu.support_size(); ++i)
    if (mu.stationary(i) > 0.0) out.push_back(mu.support()[static_cast<std::size_t>(i)]);
  const std::size_t mark = out.size();
  for (int i = 0; i < nu.support_size(); ++i)
    if (nu.stationary(i) > 0.0) out.push_back(nu.support()[static_cast<std::size_t>(i)]);
  std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(mark), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

double sup_deviation_at_depth(const MarkovMeasure& mu, const MarkovMeasure& nu,
                              int target) {
  double best = 0.0;
  std::vector<std::vector<int>> scratch(static_cast<std::size_t>(target) + 1);
  // Any extension of a prefix has mass at most the prefix mass under either
  // measure, so a prefix with max mass <= best cannot improve the sup.
  std::function<void(int, double, double, int)> dfs = [&](int v, double m_mu,
                                                          double m_nu, int len) {
    if (len == target) {
      best = std::max(best, std::abs(m_mu - m_nu));
      return;
    }
    if (std::max(m_mu, m_nu) <= best) return;
    const int lmu = m_mu > 0.0 ? mu.local_index(v) : -1;
    const int lnu = m_nu > 0.0 ? nu.local_index(v) : -1;
    auto& children = scratch[static_cast<std::size_t>(len)];
    merged_successors(mu, lmu, nu, lnu, children);
    for (int w : children) {
      const int cmu = lmu >= 0 ? mu.local_index(w) : -1;
      const int cnu = lnu >= 0 ? nu.local_index(w) : -1;
      const double next_mu = (lmu >= 0 && cmu >= 0) ? m_mu * mu.trans(lmu, cmu) : 0.0;
      const double next_nu = (lnu >= 0 && cnu >= 0) ? m_nu * nu.trans(lnu, cnu) : 0.0;
      dfs(w, next_mu, next_nu, len + 1);
    }
  };
  std::vector<int> roots;
  merged_roots(mu, nu, roots);
  for (int v : roots) {
    const int lmu = mu.local_index(v);
    const int lnu = nu.local_index(v);
    dfs(v, lmu >= 0 ? mu.stationary(lmu) : 0.0, lnu >= 0 ? nu.stationary(lnu) : 0.0, 1);
  }
  return best;
}

}  // namespace

const char* to_string(WsVerdict v) {
  switch (v) {
    case WsVerdict::converges: return "converges";
    case WsVerdict::diverges: return "diverges";
    case WsVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(UscVerdict v) {
  switch (v) {
    case UscVerdict::usc_holds: return "usc_holds";
    case UscVerdict::usc_violated: return "usc_violated";
    case UscVerdict::not_applicable: return "not_applicable";
  }
  return "?";
}

double cylinder_metric(const MarkovMeasure& mu, const MarkovMeasure& nu, int depth) {
  if (depth < 1) throw PreconditionError("depth must be positive");
  check_compatible(mu, nu);
  const Truncation& t = *mu.ambient();
  double total = 0.0;
  for (int k = 1; k <= depth; ++k) {
    const double level_weight = std::ldexp(1.0, -k);
    int rank = 0;
    double level = 0.0;
    for_admissible_words(t, k, [&](std::span<const int> w) {
      level += std::ldexp(1.0, -rank) * std::abs(mu.mass(w) - nu.mass(w));
      return ++rank <= kRankCap;
    });
    total += level_weight * level;
  }
  return total;
}

std::vector<double> sup_cylinder_deviations(const MarkovMeasure& mu,
                                            const MarkovMeasure& nu, int depth) {
  if (depth < 1) throw PreconditionError("depth must be positive");
  check_compatible(mu, nu);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) out.push_back(sup_deviation_at_depth(mu, nu, k));
  return out;
}

ConvergenceReport check_weakstar_limit(const std::vector<MarkovMeasure>& seq,
                                       const MarkovMeasure& mu, int depth, double tol) {
  if (seq.empty()) throw PreconditionError("empty sequence");
  if (seq.size() < 3) throw PreconditionError("sequence must have length >= 3");
  if (tol <= 0) throw PreconditionError("tolerance must be positive");
  ConvergenceReport rep;
  rep.depth = depth;
  rep.tol = tol;
  rep.index_range = {0, static_cast<int>(seq.size()) - 1};
  for (const auto& m : seq) {
    auto devs = sup_cylinder_deviations(m, mu, depth);
    rep.sup_dev.push_back(*std::max_element(devs.begin(), devs.end()));
    rep.sup_devs.push_back(std::move(devs));
    rep.metric.push_back(cylinder_metric(m, mu, depth));
  }
  // Monotone trend judged over the final half; an oscillating sequence can
  // still land its last index on the limit.
  const std::size_t L = seq.size();
  const std::size_t tail_start = L - (L + 1) / 2;
  bool nonincreasing = true;
  double tail_max = 0.0;
  for (std::size_t i = tail_start; i < L; ++i) {
    tail_max = std::max(tail_max, rep.sup_dev[i]);
    if (i > tail_start && rep.sup_dev[i] > rep.sup_dev[i - 1] + kMonotoneSlack)
      nonincreasing = false;
  }
  if (rep.sup_dev.back() < tol && nonincreasing)
    rep.verdict = WsVerdict::converges;
  else if (tail_max >= tol && !nonincreasing)
    rep.verdict = WsVerdict::diverges;
  else
    rep.verdict = WsVerdict::inconclusive;
  return rep;
}

UscReport usc_check(const std::vector<MarkovMeasure>& seq, const MarkovMeasure& mu,
                    double tol, int ws_depth, double ws_tol) {
  if (tol <= 0) throw PreconditionError("tolerance must be positive");
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (!seq[i].ergodic())
      throw PreconditionError("sequence member " + std::to_string(i) +
                              " is not ergodic; the check applies to ergodic measures");
  if (!mu.ergodic())
    throw PreconditionError("limit measure is not ergodic");
  UscReport rep;
  rep.tol = tol;
  rep.convergence = check_weakstar_limit(seq, mu, ws_depth, ws_tol);
  rep.limit_entropy = ks_entropy(mu);
  for (const auto& m : seq) rep.entropies.push_back(ks_entropy(m));
  if (rep.convergence.verdict != WsVerdict::converges) {
    rep.verdict = UscVerdict::not_applicable;
    return rep;
  }
  const std::size_t L = seq.size();
  const std::size_t tail_start = L - (L + 2) / 3;
  rep.tail_max_entropy = rep.entropies[tail_start];
  int arg = static_cast<int>(tail_start);
  for (std::size_t i = tail_start; i < L; ++i) {
    if (rep.entropies[i] > rep.tail_max_entropy) {
      rep.tail_max_entropy = rep.entropies[i];
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
