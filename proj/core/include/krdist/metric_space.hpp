#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace krdist {

// Finite metric space. Backed either by coordinates in R^d (Euclidean
// metric) or by an explicit n x n distance matrix.
class PointSet {
 public:
  PointSet() = default;

  static PointSet from_coordinates(std::size_t dim, std::vector<double> coords);
  static PointSet from_distance_matrix(std::size_t n, std::vector<double> dmat);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  bool has_coordinates() const { return !matrix_; }

  double distance(std::size_t i, std::size_t j) const;
  std::span<const double> point(std::size_t i) const;
  const std::vector<double>& coordinates() const { return coords_; }

  double diameter() const;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  bool matrix_ = false;
  std::vector<double> coords_;
  std::vector<double> dmat_;
};

// Points selected by index plus the Voronoi assignment of every point of the
// space to a position in `centers`.
struct Covering {
  std::vector<std::size_t> centers;
  double radius = 0.0;
  std::vector<std::size_t> assignment;
};

// Farthest-point traversal seeded at index 0, stopped once every point is
// within eps of a selected center. Ties go to the lowest index.
Covering greedy_covering(const PointSet& space, double eps);

// Distances d(x_k, {x_1..x_{k-1}}) at the moment each center of the full
// farthest-point traversal was selected; entry 0 is +inf.
std::vector<double> farthest_point_radii(const PointSet& space,
                                         std::vector<std::size_t>* order = nullptr);

// Nearest center for every point; ties go to the earliest center in the list.
std::vector<std::size_t> voronoi_partition(const PointSet& space,
                                           std::span<const std::size_t> centers);

struct CoveringProfile {
  std::vector<double> eps;
  std::vector<std::size_t> sizes;
  double alpha_hat = 0.0;  // minus the log-log slope of size against eps
};

CoveringProfile covering_number_profile(const PointSet& space,
                                        std::span<const double> eps_grid);

PointSet subset(const PointSet& space, std::span<const std::size_t> indices);

// Stacks two coordinate-backed spaces of the same dimension.
PointSet concatenate(const PointSet& a, const PointSet& b);

struct Dedup {
  PointSet unique;
  std::vector<std::size_t> map;  // original index -> index in `unique`
};

// Merges points at distance exactly zero, keeping the first occurrence.
Dedup dedup_points(const PointSet& space);

}  // namespace krdist
