#include "krdist/krd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace krdist {

void KrdParams::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 1");
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be > 0");
}

double truncated_cost_ratio(double d, double C, double p) {
  if (d >= C) return 1.0;
  if (d <= 0.0) return 0.0;
  const double r = d / C;
  return p > 50.0 ? std::exp(p * std::log(r)) : std::pow(r, p);
}

namespace {

// Lifted problem in units of C^p: truncated costs on the supports, 1/2 to
// and from the augmentation point, 0 between the two augmentation copies.
struct Lifted {
  std::vector<double> supply, demand;
  CostMatrix cost;
};

Lifted build_lifted(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& prm,
                    double K) {
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  const std::size_t n = a.size(), m = b.size();
  Lifted L;
  L.supply.resize(n + 1);
  L.demand.resize(m + 1);
  for (std::size_t i = 0; i < n; ++i) L.supply[i] = a[i].weight;
  for (std::size_t j = 0; j < m; ++j) L.demand[j] = b[j].weight;
  L.supply[n] = std::max(0.0, K - mu.total_mass());
  L.demand[m] = std::max(0.0, K - nu.total_mass());
  L.cost = CostMatrix(n + 1, m + 1);
  const PointSet& X = mu.space();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      L.cost(i, j) = truncated_cost_ratio(X.distance(a[i].index, b[j].index), prm.C, prm.p);
    L.cost(i, m) = 0.5;
  }
  for (std::size_t j = 0; j < m; ++j) L.cost(n, j) = 0.5;
  L.cost(n, m) = 0.0;
  return L;
}

double check_padding(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double K) {
  const double mm = std::max(mu.total_mass(), nu.total_mass());
  if (!(K >= mm * (1.0 - 1e-12)) || !std::isfinite(K))
    throw std::invalid_argument("padding mass K is below the larger total mass");
  return mm;
}

}  // namespace

KrdResult krd(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params) {
  params.validate();
  require_same_space(mu, nu);
  const double mmu = mu.total_mass(), mnu = nu.total_mass();
  const double K = std::max(mmu, mnu);
  Lifted L = build_lifted(mu, nu, params, K);
  const std::size_t n = mu.support_size(), m = nu.support_size();

  TransportPlan tp = solve_balanced(L.supply, L.demand, L.cost);
  KrdResult res;
  res.pivots = tp.pivots;
  res.value = params.C * std::pow(std::max(tp.objective, 0.0), 1.0 / params.p);

  UnbalancedPlan& up = res.plan;
  const PointSet& X = mu.space();
  for (const auto& t : tp.entries) {
    if (t.src >= n || t.dst >= m) continue;
    const std::size_t xi = mu.atoms()[t.src].index, yj = nu.atoms()[t.dst].index;
    if (X.distance(xi, yj) < params.C) {
      up.entries.push_back({xi, yj, t.mass});
      up.transported_mass += t.mass;
    }
  }
  up.destroyed_source = std::max(0.0, mmu - up.transported_mass);
  up.destroyed_target = std::max(0.0, mnu - up.transported_mass);
  up.value = res.value;
  return res;
}

double krd_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params) {
  return krd(mu, nu, params).value;
}

double krd_lifted(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params,
                  double K) {
  params.validate();
  require_same_space(mu, nu);
  check_padding(mu, nu, K);
  Lifted L = build_lifted(mu, nu, params, K);
  TransportPlan tp = solve_balanced(L.supply, L.demand, L.cost);
  return params.C * std::pow(std::max(tp.objective, 0.0), 1.0 / params.p);
}

KInvariance krd_value_independent_of_K(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const KrdParams& params, std::span<const double> K_list) {
  if (K_list.empty()) throw std::invalid_argument("empty K list");
  for (double K : K_list) check_padding(mu, nu, K);
  KInvariance out;
  for (double K : K_list) out.values.push_back(krd_lifted(mu, nu, params, K));
  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  out.max_relative_spread = (*hi - *lo) / std::max(1.0, std::abs(*hi));
  return out;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 1");
  require_same_space(mu, nu);
  const double mmu = mu.total_mass(), mnu = nu.total_mass();
  if (std::abs(mmu - mnu) > 1e-9 * std::max({mmu, mnu, 1e-300}))
    throw std::invalid_argument("wasserstein requires balanced masses");
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  if (a.empty() || b.empty()) return 0.0;
  const PointSet& X = mu.space();
  CostMatrix cost(a.size(), b.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      cost(i, j) = X.distance(a[i].index, b[j].index);
      scale = std::max(scale, cost(i, j));
    }
  if (scale == 0.0) return 0.0;
  for (double& c : cost.data) c = truncated_cost_ratio(c, scale, p);
  std::vector<double> sa(a.size()), sb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) sa[i] = a[i].weight;
  for (std::size_t j = 0; j < b.size(); ++j) sb[j] = b[j].weight;
  TransportPlan tp = solve_balanced(sa, sb, cost);
  return scale * std::pow(std::max(tp.objective, 0.0), 1.0 / p);
}

}  // namespace krdist
