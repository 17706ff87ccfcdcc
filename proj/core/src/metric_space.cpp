#include "krdist/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace krdist {

PointSet PointSet::from_coordinates(std::size_t dim, std::vector<double> coords) {
  if (dim == 0) throw std::invalid_argument("coordinate dimension must be positive");
  if (coords.size() % dim != 0)
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  for (double c : coords)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
  PointSet s;
  s.n_ = coords.size() / dim;
  s.dim_ = dim;
  s.coords_ = std::move(coords);
  return s;
}

PointSet PointSet::from_distance_matrix(std::size_t n, std::vector<double> dmat) {
  if (dmat.size() != n * n) throw std::invalid_argument("distance matrix has wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (dmat[i * n + i] != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      double d = dmat[i * n + j];
      if (!(d >= 0.0) || !std::isfinite(d))
        throw std::invalid_argument("distance matrix entries must be finite and nonnegative");
      if (d != dmat[j * n + i]) throw std::invalid_argument("distance matrix must be symmetric");
    }
  }
  PointSet s;
  s.n_ = n;
  s.matrix_ = true;
  s.dmat_ = std::move(dmat);
  return s;
}

double PointSet::distance(std::size_t i, std::size_t j) const {
  if (matrix_) return dmat_[i * n_ + j];
  const double* a = coords_.data() + i * dim_;
  const double* b = coords_.data() + j * dim_;
  double s = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

std::span<const double> PointSet::point(std::size_t i) const {
  if (matrix_) throw std::logic_error("point set has no coordinates");
  return {coords_.data() + i * dim_, dim_};
}

double PointSet::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) d = std::max(d, distance(i, j));
  return d;
}

std::vector<double> farthest_point_radii(const PointSet& space,
                                         std::vector<std::size_t>* order) {
  const std::size_t n = space.size();
  std::vector<double> radii;
  if (order) order->clear();
  if (n == 0) return radii;
  std::vector<double> near(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::size_t next = 0;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    radii.push_back(r);
    if (order) order->push_back(next);
    taken[next] = true;
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      near[i] = std::min(near[i], space.distance(i, next));
      if (near[i] > best_d) {
        best_d = near[i];
        best = i;
      }
    }
    if (best == n) break;
    next = best;
    r = best_d;
  }
  return radii;
}

Covering greedy_covering(const PointSet& space, double eps) {
  if (space.size() == 0) throw std::invalid_argument("empty space");
  if (!(eps >= 0.0)) throw std::invalid_argument("covering radius must be nonnegative");
  const std::size_t n = space.size();
  Covering cov;
  cov.radius = eps;
  std::vector<double> near(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (true) {
    cov.centers.push_back(next);
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      near[i] = std::min(near[i], space.distance(i, next));
      if (near[i] > best_d) {
        best_d = near[i];
        best = i;
      }
    }
    if (best_d <= eps) break;
    next = best;
  }
  cov.assignment = voronoi_partition(space, cov.centers);
  return cov;
}

std::vector<std::size_t> voronoi_partition(const PointSet& space,
                                           std::span<const std::size_t> centers) {
  if (centers.empty()) throw std::invalid_argument("no centers");
  std::vector<std::size_t> cell(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    std::size_t best = 0;
    double best_d = space.distance(i, centers[0]);
    for (std::size_t k = 1; k < centers.size(); ++k) {
      double d = space.distance(i, centers[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    cell[i] = best;
  }
  return cell;
}

CoveringProfile covering_number_profile(const PointSet& space,
                                        std::span<const double> eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("empty eps grid");
  if (space.size() == 0) throw std::invalid_argument("empty space");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw std::invalid_argument("eps grid values must be positive");
  // One traversal serves every radius: the covering at eps keeps the prefix
  // of centers whose insertion radius exceeds eps.
  std::vector<double> radii = farthest_point_radii(space);
  CoveringProfile prof;
  for (double e : eps_grid) {
    std::size_t k = 1;
    while (k < radii.size() && radii[k] > e) ++k;
    prof.eps.push_back(e);
    prof.sizes.push_back(k);
  }
  if (prof.eps.size() >= 2) {
    double mx = 0, my = 0;
    const double m = static_cast<double>(prof.eps.size());
    for (std::size_t i = 0; i < prof.eps.size(); ++i) {
      mx += std::log(prof.eps[i]);
      my += std::log(static_cast<double>(prof.sizes[i]));
    }
    mx /= m;
    my /= m;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < prof.eps.size(); ++i) {
      double dx = std::log(prof.eps[i]) - mx;
      sxy += dx * (std::log(static_cast<double>(prof.sizes[i])) - my);
      sxx += dx * dx;
    }
    prof.alpha_hat = sxx > 0 ? -sxy / sxx : 0.0;
  }
  return prof;
}

PointSet subset(const PointSet& space, std::span<const std::size_t> indices) {
  if (space.has_coordinates()) {
    std::vector<double> c;
    c.reserve(indices.size() * space.dim());
    for (std::size_t i : indices) {
      auto p = space.point(i);
      c.insert(c.end(), p.begin(), p.end());
    }
    return PointSet::from_coordinates(space.dim(), std::move(c));
  }
  const std::size_t k = indices.size();
  std::vector<double> d(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) d[a * k + b] = space.distance(indices[a], indices[b]);
  return PointSet::from_distance_matrix(k, std::move(d));
}

PointSet concatenate(const PointSet& a, const PointSet& b) {
  if (!a.has_coordinates() || !b.has_coordinates())
    throw std::invalid_argument("concatenate needs coordinate-backed spaces");
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> c = a.coordinates();
  c.insert(c.end(), b.coordinates().begin(), b.coordinates().end());
  return PointSet::from_coordinates(a.dim(), std::move(c));
}

Dedup dedup_points(const PointSet& space) {
  Dedup out;
  const std::size_t n = space.size();
  out.map.resize(n);
  std::vector<std::size_t> keep;
  if (space.has_coordinates()) {
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
      auto p = space.point(i);
      std::vector<double> key(p.begin(), p.end());
      for (double& v : key)
        if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
      auto [it, fresh] = seen.emplace(std::move(key), keep.size());
      if (fresh) keep.push_back(i);
      out.map[i] = it->second;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t found = keep.size();
      for (std::size_t k = 0; k < keep.size(); ++k)
        if (space.distance(i, keep[k]) == 0.0) {
          found = k;
          break;
        }
      if (found == keep.size()) keep.push_back(i);
      out.map[i] = found;
    }
  }
  out.unique = n == 0 ? PointSet{} : subset(space, keep);
  return out;
}

}  // namespace krdist
