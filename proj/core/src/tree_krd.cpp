#include "krdist/tree_krd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace krdist {

double UltrametricTree::height(int l) const {
  if (l > L) return 0.0;
  return (std::ldexp(1.0, 1 - l) - std::ldexp(1.0, -L)) * diameter;
}

std::size_t UltrametricTree::leaf_position(std::size_t point) const {
  const auto& leaves = levels.back();
  auto it = std::find(leaves.begin(), leaves.end(), point);
  return it == leaves.end() ? npos : static_cast<std::size_t>(it - leaves.begin());
}

double UltrametricTree::leaf_distance(std::size_t a, std::size_t b) const {
  int j = L + 1;
  while (a != b) {
    a = parent[j][a];
    b = parent[j][b];
    --j;
  }
  return 2.0 * height(j);
}

UltrametricTree build_tree(const PointSet& space, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  UltrametricTree t;
  t.eps = eps;
  t.leaf_covering = greedy_covering(space, eps);
  const std::vector<std::size_t>& S = t.leaf_covering.centers;
  PointSet sub = subset(space, S);
  t.diameter = sub.diameter();
  const double D = t.diameter;

  int L = 0;
  if (D > 0.0)
    while (std::ldexp(D, -L) > eps * (1.0 + 1e-12)) ++L;
  t.L = L;

  t.levels.resize(L + 2);
  t.parent.resize(L + 2);
  t.levels[L + 1] = S;
  for (int j = 0; j <= L; ++j) {
    Covering c = greedy_covering(sub, std::ldexp(D, -j));
    for (std::size_t k : c.centers) t.levels[j].push_back(S[k]);
  }
  for (int j = 1; j <= L + 1; ++j) {
    const double r = std::ldexp(D, -(j - 1));
    for (std::size_t node : t.levels[j]) {
      std::size_t par = UltrametricTree::npos;
      for (std::size_t k = 0; k < t.levels[j - 1].size(); ++k)
        if (space.distance(node, t.levels[j - 1][k]) <= r * (1.0 + 1e-12)) {
          par = k;
          break;
        }
      if (par == UltrametricTree::npos) throw std::logic_error("tree level is not a covering");
      t.parent[j].push_back(par);
    }
  }
  return t;
}

double tree_krd_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const UltrametricTree& tree, const KrdParams& params) {
  params.validate();
  require_same_space(mu, nu);
  const int L = tree.L;
  const double p = params.p, C = params.C;

  // Signed mass differences on the leaves, then aggregated upwards.
  std::vector<std::vector<double>> diff(L + 2);
  for (int j = 0; j <= L + 1; ++j) diff[j].assign(tree.levels[j].size(), 0.0);
  auto add = [&](const DiscreteMeasure& m, double sign) {
    for (const Atom& a : m.atoms()) {
      std::size_t pos = tree.leaf_position(a.index);
      if (pos == UltrametricTree::npos)
        throw std::invalid_argument("measure is not supported on the tree leaves");
      diff[L + 1][pos] += sign * a.weight;
    }
  };
  add(mu, 1.0);
  add(nu, -1.0);
  for (int j = L + 1; j >= 1; --j)
    for (std::size_t k = 0; k < diff[j].size(); ++k) diff[j - 1][tree.parent[j][k]] += diff[j][k];

  const double D = tree.diameter;
  int lstar = 0;
  if (D > 0.0) {
    double x = std::log2(2.0 * D / (C + tree.eps));
    lstar = static_cast<int>(std::floor(std::max(0.0, x)));
  }
  lstar = 1 + std::min(L, lstar);

  double bound = 0.5 * std::pow(C, p) * std::abs(mu.total_mass() - nu.total_mass());
  const double c2 = std::pow(2.0, p - 1.0);
  for (int j = lstar; j <= L + 1; ++j) {
    double w = std::pow(tree.height(j - 1), p) - std::pow(tree.height(j), p);
    double s = 0.0;
    for (double d : diff[j]) s += std::abs(d);
    bound += c2 * w * s;
  }
  return bound;
}

SandwichReport discretization_sandwich(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double eps, const KrdParams& params) {
  params.validate();
  require_same_space(mu, nu);
  UltrametricTree tree = build_tree(mu.space(), eps);
  DiscreteMeasure me = project_to_covering(mu, tree.leaf_covering);
  DiscreteMeasure ne = project_to_covering(nu, tree.leaf_covering);
  SandwichReport r;
  const double p = params.p;
  r.exact = krd_value(mu, nu, params);
  r.projected_exact = krd_value(me, ne, params);
  r.tree_bound = tree_krd_bound(me, ne, tree, params);
  r.discretization_bound = std::pow(3.0, p - 1.0) *
                    (std::pow(r.projected_exact, p) +
                     (mu.total_mass() + nu.total_mass()) * std::pow(std::min(params.C, eps), p));
  const double slack = 1e-9;
  r.discretization_holds = std::pow(r.exact, p) <= r.discretization_bound * (1.0 + slack) + 1e-12;
  r.tree_holds = std::pow(r.projected_exact, p) <= r.tree_bound * (1.0 + slack) + 1e-12;
  return r;
}

}  // namespace krdist
