#pragma once

#include <span>
#include <vector>

#include "krdist/discrete_measure.hpp"
#include "krdist/ot_solver.hpp"

namespace krdist {

struct KrdParams {
  double p = 1.0;  // order, p >= 1
  double C = 1.0;  // cutoff, C > 0

  void validate() const;
};

// Transport part of an optimal unbalanced plan. Only pairs at distance
// strictly below C are kept; mass the lifted plan sends over distance >= C
// or to the augmentation point is reported as destroyed.
struct UnbalancedPlan {
  std::vector<TransportEntry> entries;  // src and dst are point indices
  double transported_mass = 0.0;
  double destroyed_source = 0.0;
  double destroyed_target = 0.0;
  double value = 0.0;
};

struct KrdResult {
  double value = 0.0;
  UnbalancedPlan plan;
  std::size_t pivots = 0;
};

// Exact (p, C)-Kantorovich-Rubinstein distance through the balanced lifting
// with padding mass max(m_mu, m_nu).
KrdResult krd(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params);

double krd_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params);

// Same distance computed with an explicit padding mass K >= max(m_mu, m_nu).
double krd_lifted(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KrdParams& params,
                  double K);

struct KInvariance {
  std::vector<double> values;
  double max_relative_spread = 0.0;
};

KInvariance krd_value_independent_of_K(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const KrdParams& params, std::span<const double> K_list);

// p-Wasserstein distance between measures of equal mass.
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// min(d / C, 1)^p, evaluated in log space for large p.
double truncated_cost_ratio(double d, double C, double p);

}  // namespace krdist
