#include "krdist/spatial_law.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace krdist {

Box Box::unit(std::size_t dim) { return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

double Box::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  return true;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("box bounds have mismatched dimensions");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(hi[k] >= lo[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
      throw std::invalid_argument("box bounds must satisfy lo <= hi");
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Mass of N(mean, sd^2 I) inside a box.
double gaussian_box_mass(const GaussianComponent& g, const Box& b) {
  double m = 1.0;
  for (std::size_t k = 0; k < b.dim(); ++k)
    m *= std::max(0.0, normal_cdf((b.hi[k] - g.mean[k]) / g.sd) - normal_cdf((b.lo[k] - g.mean[k]) / g.sd));
  return m;
}

Box intersect(const Box& a, const Box& b) {
  Box r = a;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    r.lo[k] = std::max(a.lo[k], b.lo[k]);
    r.hi[k] = std::max(r.lo[k], std::min(a.hi[k], b.hi[k]));
  }
  return r;
}

}  // namespace

SpatialLaw SpatialLaw::uniform(Box box) {
  box.validate();
  if (!(box.volume() > 0.0)) throw std::invalid_argument("uniform law needs a box of positive volume");
  SpatialLaw s;
  s.kind_ = Kind::Uniform;
  s.box_ = std::move(box);
  return s;
}

SpatialLaw SpatialLaw::gaussian_mixture(Box box, std::vector<GaussianComponent> comps) {
  box.validate();
  if (comps.empty()) throw std::invalid_argument("gaussian mixture needs components");
  SpatialLaw s;
  s.kind_ = Kind::GaussianMixture;
  s.box_ = std::move(box);
  double wsum = 0.0;
  for (const auto& c : comps) {
    if (c.mean.size() != s.box_.dim()) throw std::invalid_argument("component mean has wrong dimension");
    if (!(c.sd > 0.0) || !(c.weight >= 0.0)) throw std::invalid_argument("invalid mixture component");
    wsum += c.weight;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("mixture weights sum to zero");
  for (auto& c : comps) c.weight /= wsum;
  s.normalizer_ = 0.0;
  for (const auto& c : comps) {
    s.component_mass_.push_back(gaussian_box_mass(c, s.box_));
    s.normalizer_ += c.weight * s.component_mass_.back();
  }
  if (!(s.normalizer_ > 1e-12)) throw std::invalid_argument("mixture puts no mass in the box");
  s.components_ = std::move(comps);
  return s;
}

SpatialLaw SpatialLaw::discrete(PointSet points, std::vector<double> probabilities) {
  if (!points.has_coordinates() || points.size() == 0 || probabilities.size() != points.size())
    throw std::invalid_argument("discrete law needs coordinates and one probability per point");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw std::invalid_argument("probabilities must be nonnegative");
    total += p;
  }
  if (!(total > 0.0)) throw std::invalid_argument("probabilities sum to zero");
  SpatialLaw s;
  s.kind_ = Kind::Discrete;
  const std::size_t d = points.dim();
  s.box_.lo.assign(d, std::numeric_limits<double>::infinity());
  s.box_.hi.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto x = points.point(i);
    for (std::size_t k = 0; k < d; ++k) {
      s.box_.lo[k] = std::min(s.box_.lo[k], x[k]);
      s.box_.hi[k] = std::max(s.box_.hi[k], x[k]);
    }
  }
  for (double& p : probabilities) p /= total;
  s.cumulative_.resize(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(), s.cumulative_.begin());
  s.cumulative_.back() = 1.0;
  s.atoms_ = std::move(points);
  s.probs_ = std::move(probabilities);
  return s;
}

void SpatialLaw::sample(Philox& rng, double* out) const {
  const std::size_t d = dim();
  switch (kind_) {
    case Kind::Uniform:
      for (std::size_t k = 0; k < d; ++k) out[k] = box_.lo[k] + (box_.hi[k] - box_.lo[k]) * rng.uniform();
      return;
    case Kind::GaussianMixture: {
      boost::random::normal_distribution<double> z;
      while (true) {
        double u = rng.uniform(), acc = 0.0;
        std::size_t c = 0;
        for (; c + 1 < components_.size(); ++c) {
          acc += components_[c].weight;
          if (u <= acc) break;
        }
        const auto& g = components_[c];
        bool inside = true;
        for (std::size_t k = 0; k < d; ++k) {
          out[k] = g.mean[k] + g.sd * z(rng);
          inside = inside && out[k] >= box_.lo[k] && out[k] <= box_.hi[k];
        }
        if (inside) return;
      }
    }
    case Kind::Discrete: {
      double u = rng.uniform();
      auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
      std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), probs_.size() - 1);
      auto x = atoms_.point(i);
      std::copy(x.begin(), x.end(), out);
      return;
    }
  }
}

double SpatialLaw::probability(const Box& region) const {
  if (region.dim() != dim()) throw std::invalid_argument("region has wrong dimension");
  switch (kind_) {
    case Kind::Uniform:
      return intersect(box_, region).volume() / box_.volume();
    case Kind::GaussianMixture: {
      Box r = intersect(box_, region);
      double m = 0.0;
      for (const auto& c : components_) m += c.weight * gaussian_box_mass(c, r);
      return m / normalizer_;
    }
    case Kind::Discrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < probs_.size(); ++i)
        if (region.contains(atoms_.point(i))) m += probs_[i];
      return m;
    }
  }
  return 0.0;
}

Proxy SpatialLaw::proxy(std::size_t per_axis) const {
  Proxy px;
  if (kind_ == Kind::Discrete) {
    px.points = atoms_;
    px.weights = probs_;
    return px;
  }
  if (per_axis == 0) throw std::invalid_argument("proxy needs at least one cell per axis");
  const std::size_t d = dim();
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= per_axis;
  std::vector<double> coords;
  coords.reserve(total * d);
  std::vector<std::size_t> idx(d, 0);
  double diag = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double h = (box_.hi[k] - box_.lo[k]) / static_cast<double>(per_axis);
    diag += 0.25 * h * h;
  }
  px.mesh = std::sqrt(diag);
  for (std::size_t c = 0; c < total; ++c) {
    Box cell;
    cell.lo.resize(d);
    cell.hi.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      double h = (box_.hi[k] - box_.lo[k]) / static_cast<double>(per_axis);
      cell.lo[k] = box_.lo[k] + h * static_cast<double>(idx[k]);
      cell.hi[k] = cell.lo[k] + h;
      coords.push_back(cell.lo[k] + 0.5 * h);
    }
    px.weights.push_back(probability(cell));
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
  }
  double s = std::accumulate(px.weights.begin(), px.weights.end(), 0.0);
  for (double& w : px.weights) w /= s;
  px.points = PointSet::from_coordinates(d, std::move(coords));
  return px;
}

}  // namespace krdist
