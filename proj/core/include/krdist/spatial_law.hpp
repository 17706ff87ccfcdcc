#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "krdist/metric_space.hpp"
#include "krdist/rng.hpp"

namespace krdist {

// Axis-aligned box [lo, hi] in R^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box unit(std::size_t dim);
  std::size_t dim() const { return lo.size(); }
  double volume() const;
  bool contains(std::span<const double> x) const;
  void validate() const;
};

struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  double sd = 1.0;
};

// Discrete proxy of a probability law: atoms with weights summing to one and
// the largest distance from a point of the support to its nearest atom.
struct Proxy {
  PointSet points;
  std::vector<double> weights;
  double mesh = 0.0;
};

// Probability law of event locations on a box.
class SpatialLaw {
 public:
  enum class Kind { Uniform, GaussianMixture, Discrete };

  SpatialLaw() = default;
  static SpatialLaw uniform(Box box);
  // Mixture of isotropic Gaussians conditioned on the box.
  static SpatialLaw gaussian_mixture(Box box, std::vector<GaussianComponent> components);
  // Finitely many atoms; the box is their bounding box.
  static SpatialLaw discrete(PointSet points, std::vector<double> probabilities);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return box_.dim(); }
  const Box& domain() const { return box_; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const PointSet& atoms() const { return atoms_; }
  const std::vector<double>& atom_probabilities() const { return probs_; }

  void sample(Philox& rng, double* out) const;

  // Probability of a box region.
  double probability(const Box& region) const;

  // Grid proxy with `per_axis` cells per coordinate; atoms sit at the cell
  // centres and carry the exact cell probabilities. Discrete laws return
  // their own atoms.
  Proxy proxy(std::size_t per_axis) const;

 private:
  Kind kind_ = Kind::Uniform;
  Box box_;
  std::vector<GaussianComponent> components_;
  std::vector<double> component_mass_;  // mass of each component inside the box
  double normalizer_ = 1.0;
  PointSet atoms_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace krdist
