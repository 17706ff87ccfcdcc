#include "krdist/discrete_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace krdist {

DiscreteMeasure::DiscreteMeasure(std::shared_ptr<const PointSet> space, std::vector<Atom> atoms)
    : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("measure needs a space");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.index < b.index; });
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& a = atoms[k];
    if (a.index >= space_->size()) throw std::invalid_argument("atom index out of range");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("atom weights must be finite and nonnegative");
    if (k > 0 && atoms[k - 1].index == a.index) throw std::invalid_argument("duplicate atom index");
    if (a.weight > 0.0) atoms_.push_back(a);
  }
}

DiscreteMeasure DiscreteMeasure::from_dense(std::shared_ptr<const PointSet> space,
                                            std::span<const double> weights) {
  if (!space || weights.size() != space->size())
    throw std::invalid_argument("dense weight vector does not match the space");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) atoms.push_back({i, weights[i]});
  return DiscreteMeasure(std::move(space), std::move(atoms));
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

double DiscreteMeasure::weight_at(std::size_t index) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), index,
                             [](const Atom& a, std::size_t i) { return a.index < i; });
  return it != atoms_.end() && it->index == index ? it->weight : 0.0;
}

std::vector<double> DiscreteMeasure::dense() const {
  std::vector<double> w(space_ ? space_->size() : 0, 0.0);
  for (const Atom& a : atoms_) w[a.index] = a.weight;
  return w;
}

DiscreteMeasure DiscreteMeasure::scale(double a) const {
  if (!(a >= 0.0)) throw std::invalid_argument("scale factor must be nonnegative");
  std::vector<Atom> atoms = atoms_;
  for (Atom& x : atoms) x.weight *= a;
  return DiscreteMeasure(space_, std::move(atoms));
}

void require_same_space(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!mu.space_ptr() || mu.space_ptr() != nu.space_ptr())
    throw std::invalid_argument("measures live on different spaces");
}

DiscreteMeasure project_to_covering(const DiscreteMeasure& mu, const Covering& cov) {
  if (cov.assignment.size() != mu.space().size())
    throw std::invalid_argument("covering does not match the measure's space");
  std::vector<double> w(mu.space().size(), 0.0);
  for (const Atom& a : mu.atoms()) w[cov.centers[cov.assignment[a.index]]] += a.weight;
  return DiscreteMeasure::from_dense(mu.space_ptr(), w);
}

namespace {

template <class F>
void merge_diff(const DiscreteMeasure& mu, const DiscreteMeasure& nu, F&& f) {
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      f(a[i++].weight);
    } else if (i == a.size() || b[j].index < a[i].index) {
      f(-b[j++].weight);
    } else {
      f(a[i++].weight - b[j++].weight);
    }
  }
}

}  // namespace

double tv_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu);
  double pos = 0.0, neg = 0.0;
  merge_diff(mu, nu, [&](double d) { (d > 0 ? pos : neg) += std::abs(d); });
  return std::max(pos, neg);
}

double tv_norm(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu);
  double s = 0.0;
  merge_diff(mu, nu, [&](double d) { s += std::abs(d); });
  return s;
}

}  // namespace krdist
