#pragma once

#include <cstddef>
#include <vector>

#include "krdist/discrete_measure.hpp"
#include "krdist/krd.hpp"
#include "krdist/metric_space.hpp"

namespace krdist {

// Hierarchy of nested coverings of an eps-covering S of the space. Level
// L+1 holds the leaves S; level j <= L is a greedy covering of S at radius
// 2^-j * D with D = diam(S), so level 0 is a single root. A node at level
// j+1 hangs below the first node of level j within 2^-j * D, and that edge
// has length 2^-j * D.
struct UltrametricTree {
  double eps = 0.0;
  double diameter = 0.0;
  int L = 0;
  Covering leaf_covering;                          // S as a covering of the space
  std::vector<std::vector<std::size_t>> levels;    // point indices, levels[0..L+1]
  std::vector<std::vector<std::size_t>> parent;    // parent[j][k]: position in levels[j-1]

  // Height of level l above the leaves: (2^(1-l) - 2^-L) * D.
  double height(int l) const;
  // Ultrametric distance between two leaves given by position in levels[L+1].
  double leaf_distance(std::size_t a, std::size_t b) const;
  // Position in levels[L+1] of a leaf point index, or npos.
  std::size_t leaf_position(std::size_t point) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

UltrametricTree build_tree(const PointSet& space, double eps);

// Upper bound on KR^p(mu, nu) for measures carried by the tree leaves.
double tree_krd_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const UltrametricTree& tree, const KrdParams& params);

struct SandwichReport {
  double exact = 0.0;            // KR(mu, nu)
  double projected_exact = 0.0;  // KR(mu_eps, nu_eps) after projecting onto the leaves
  double tree_bound = 0.0;       // bound on projected_exact^p
  double discretization_bound = 0.0;    // 3^(p-1) (projected^p + (m_mu + m_nu) min(C, eps)^p)
  bool discretization_holds = false;
  bool tree_holds = false;
};

SandwichReport discretization_sandwich(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double eps, const KrdParams& params);

}  // namespace krdist
