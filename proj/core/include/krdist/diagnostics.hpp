#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "krdist/metric_space.hpp"
#include "krdist/spatial_law.hpp"
#include "krdist/stpp.hpp"

namespace krdist {

// Voronoi partition of the event space by a list of sites; ties go to the
// earliest site.
struct Partition {
  PointSet sites;

  std::size_t size() const { return sites.size(); }
  std::size_t cell_of(std::span<const double> x) const;
};

// Single cell covering the whole space.
Partition whole_space_partition(std::size_t dim);

// Sites are the centres of a greedy eps-covering of a reference grid laid
// over the domain with spacing about eps / 4.
Partition covering_partition(const Box& domain, double eps);

struct VarianceProfile {
  std::vector<double> t;
  std::vector<double> var_sum;  // sum over cells of the sample variance of the cell count
  std::vector<double> se;       // jackknife standard error of var_sum
  std::vector<double> mean_count;
  std::size_t n_cells = 0;
  std::size_t replicates = 0;
};

// counts[r][k][c]: count of replicate r in cell c on (0, t_k].
VarianceProfile variance_from_counts(const std::vector<std::vector<std::vector<double>>>& counts,
                                     std::span<const double> t_grid);

VarianceProfile partitioned_variance(const ProcessSpec& spec, const Partition& partition,
                                     std::span<const double> t_grid, std::size_t replicates,
                                     std::uint64_t seed);

struct GrowthFit {
  double beta_hat = 0.0;   // slope - 1
  double kappa_hat = 0.0;  // exp(intercept)
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_used = 0;
};

// Least squares of log var_sum on log t over the points with var_sum > 0.
GrowthFit fit_growth(std::span<const double> t, std::span<const double> var_sum);
GrowthFit fit_growth(const VarianceProfile& profile);

struct ReducedCovarianceProfile {
  std::vector<double> lags;
  // Reduced second moment of A x B x [0, s] minus mu(A) mu(B) l([0, s]).
  std::vector<double> value;
  // Differences of `value` between consecutive lags (first entry: value[0]).
  std::vector<double> increment;
  std::vector<double> se;
  double positive_part = 0.0;
  double negative_part = 0.0;
  double mu_A = 0.0;
  double mu_B = 0.0;
  bool mu_known = false;  // true when mu(A), mu(B) come from the model
  bool discrete_time = false;
};

ReducedCovarianceProfile reduced_covariance(const ProcessSpec& spec, const Box& A, const Box& B,
                                            std::span<const double> lag_grid, double T_obs,
                                            std::size_t replicates, std::uint64_t seed);

std::vector<double> geometric_grid(double t_min, double t_max, std::size_t k);

}  // namespace krdist
