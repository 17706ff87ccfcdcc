#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "krdist/metric_space.hpp"

namespace krdist {

struct Atom {
  std::size_t index;
  double weight;
};

// Finite nonnegative measure on a PointSet, stored as sparse atoms sorted by
// point index. Zero weights are dropped.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(std::shared_ptr<const PointSet> space, std::vector<Atom> atoms);

  static DiscreteMeasure from_dense(std::shared_ptr<const PointSet> space,
                                    std::span<const double> weights);

  const PointSet& space() const { return *space_; }
  const std::shared_ptr<const PointSet>& space_ptr() const { return space_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }

  double total_mass() const;
  double weight_at(std::size_t index) const;
  std::vector<double> dense() const;
  DiscreteMeasure scale(double a) const;

 private:
  std::shared_ptr<const PointSet> space_;
  std::vector<Atom> atoms_;
};

// Moves every atom onto the covering center of its Voronoi cell.
DiscreteMeasure project_to_covering(const DiscreteMeasure& mu, const Covering& cov);

// max(sum of positive parts, sum of negative parts) of mu - nu, which is
// sup_B |mu(B) - nu(B)|.
double tv_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// sum |mu({x}) - nu({x})|.
double tv_norm(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

void require_same_space(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace krdist
