#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace krdist {

// Dense row-major n x m cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(std::size_t n, std::size_t m, double fill = 0.0) : rows(n), cols(m), data(n * m, fill) {}
  CostMatrix(std::size_t n, std::size_t m, std::vector<double> values);

  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

struct TransportEntry {
  std::size_t src;
  std::size_t dst;
  double mass;
};

struct TransportPlan {
  std::vector<TransportEntry> entries;  // positive masses, sorted by (src, dst)
  double objective = 0.0;
  // Dual potentials with u[i] + v[j] <= cost(i, j).
  std::vector<double> u;
  std::vector<double> v;
  std::size_t pivots = 0;
};

struct SolverOptions {
  double balance_tolerance = 1e-9;  // relative mass mismatch accepted
  std::size_t max_pivots = 0;       // 0 means no limit
};

// Exact balanced optimal transport by the primal network simplex method on
// the complete bipartite graph (block-search pivoting, strongly feasible
// spanning trees, artificial root).
TransportPlan solve_balanced(std::span<const double> supply, std::span<const double> demand,
                             const CostMatrix& cost, const SolverOptions& opts = {});

struct DualityReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// Checks feasibility of `plan` and builds a feasible dual (from the plan's
// potentials when present, otherwise from its support) to bound the gap.
DualityReport verify_duality(const TransportPlan& plan, std::span<const double> supply,
                             std::span<const double> demand, const CostMatrix& cost,
                             double feasibility_tolerance = 1e-9);

}  // namespace krdist
