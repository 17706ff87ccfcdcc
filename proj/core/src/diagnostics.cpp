#include "krdist/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace krdist {

std::size_t Partition::cell_of(std::span<const double> x) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sites.size(); ++k) {
    auto s = sites.point(k);
    double d = 0.0;
    for (std::size_t q = 0; q < s.size(); ++q) d += (x[q] - s[q]) * (x[q] - s[q]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

Partition whole_space_partition(std::size_t dim) {
  return Partition{PointSet::from_coordinates(dim, std::vector<double>(dim, 0.0))};
}

Partition covering_partition(const Box& domain, double eps) {
  domain.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("partition eps must be positive");
  const std::size_t d = domain.dim();
  std::vector<std::size_t> per(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    const double w = domain.hi[k] - domain.lo[k];
    per[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.0 * w / eps)));
    total *= per[k];
  }
  if (total > 200000) throw std::invalid_argument("partition eps too small for the domain");
  std::vector<double> coords;
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t k = 0; k < d; ++k) {
      const double w = domain.hi[k] - domain.lo[k];
      coords.push_back(domain.lo[k] + w * (static_cast<double>(idx[k]) + 0.5) / static_cast<double>(per[k]));
    }
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < per[k]) break;
      idx[k] = 0;
    }
  }
  PointSet ref = PointSet::from_coordinates(d, std::move(coords));
  Covering cov = greedy_covering(ref, eps);
  return Partition{subset(ref, cov.centers)};
}

std::vector<double> geometric_grid(double t_min, double t_max, std::size_t k) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || k == 0) throw std::invalid_argument("invalid geometric grid");
  std::vector<double> g;
  if (k == 1) return {t_max};
  for (std::size_t i = 0; i < k; ++i) {
    double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / static_cast<double>(k - 1));
    // Snap rounding noise so that doubling grids stay on integers.
    const double r = std::round(t);
    if (r > 0.0 && std::abs(t - r) <= 1e-12 * t) t = r;
    g.push_back(t);
  }
  g.back() = t_max;
  return g;
}

VarianceProfile variance_from_counts(const std::vector<std::vector<std::vector<double>>>& counts,
                                     std::span<const double> t_grid) {
  const std::size_t R = counts.size();
  if (R < 3) throw std::invalid_argument("need at least 3 replicates");
  VarianceProfile prof;
  prof.replicates = R;
  prof.t.assign(t_grid.begin(), t_grid.end());
  const std::size_t K = t_grid.size();
  prof.n_cells = counts[0].empty() ? 0 : counts[0][0].size();
  const double Rd = static_cast<double>(R);
  for (std::size_t k = 0; k < K; ++k) {
    double total = 0.0, mean_total = 0.0;
    std::vector<double> loo(R, 0.0);
    for (std::size_t c = 0; c < prof.n_cells; ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < R; ++r) mean += counts[r][k][c];
      mean /= Rd;
      mean_total += mean;
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        double x = counts[r][k][c] - mean;
        s1 += x;
        s2 += x * x;
      }
      total += (s2 - s1 * s1 / Rd) / (Rd - 1.0);
      for (std::size_t r = 0; r < R; ++r) {
        double x = counts[r][k][c] - mean;
        double a = s1 - x, b = s2 - x * x;
        loo[r] += (b - a * a / (Rd - 1.0)) / (Rd - 2.0);
      }
    }
    double lbar = 0.0;
    for (double v : loo) lbar += v;
    lbar /= Rd;
    double ss = 0.0;
    for (double v : loo) ss += (v - lbar) * (v - lbar);
    prof.var_sum.push_back(total);
    prof.se.push_back(std::sqrt((Rd - 1.0) / Rd * ss));
    prof.mean_count.push_back(mean_total);
  }
  return prof;
}

VarianceProfile partitioned_variance(const ProcessSpec& spec, const Partition& partition,
                                     std::span<const double> t_grid, std::size_t replicates,
                                     std::uint64_t seed) {
  if (replicates < 30) throw std::invalid_argument("partitioned_variance needs at least 30 replicates");
  if (t_grid.empty()) throw std::invalid_argument("empty t grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
      throw std::invalid_argument("t grid must be positive and increasing");
  if (partition.sites.dim() != process_dim(spec))
    throw std::invalid_argument("partition dimension does not match the process");
  Simulator sim(spec, t_grid.back());
  const std::size_t K = t_grid.size(), cells = partition.size();
  std::vector<std::vector<std::vector<double>>> counts(
      replicates, std::vector<std::vector<double>>(K, std::vector<double>(cells, 0.0)));
  for (std::size_t r = 0; r < replicates; ++r) {
    Philox rng = replicate_rng(seed, r);
    Pattern pat = sim.simulate(rng);
    std::size_t k = 0;
    std::vector<double> running(cells, 0.0);
    for (std::size_t i = 0; i < pat.size(); ++i) {
      while (k < K && pat.times[i] > t_grid[k]) counts[r][k++] = running;
      if (k == K) break;
      running[partition.cell_of(pat.location(i))] += 1.0;
    }
    while (k < K) counts[r][k++] = running;
  }
  return variance_from_counts(counts, t_grid);
}

GrowthFit fit_growth(std::span<const double> t, std::span<const double> var_sum) {
  if (t.size() != var_sum.size()) throw std::invalid_argument("t and variance lengths differ");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > 0.0 && var_sum[k] > 0.0 && std::isfinite(var_sum[k])) {
      x.push_back(std::log(t[k]));
      y.push_back(std::log(var_sum[k]));
    }
  if (x.size() < 4) throw std::invalid_argument("fit_growth needs at least 4 positive points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_growth needs distinct t values");
  GrowthFit f;
  f.n_used = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.beta_hat = f.slope - 1.0;
  f.kappa_hat = std::exp(f.intercept);
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

GrowthFit fit_growth(const VarianceProfile& profile) { return fit_growth(profile.t, profile.var_sum); }

ReducedCovarianceProfile reduced_covariance(const ProcessSpec& spec, const Box& A, const Box& B,
                                            std::span<const double> lag_grid, double T_obs,
                                            std::size_t replicates, std::uint64_t seed) {
  if (lag_grid.empty()) throw std::invalid_argument("empty lag grid");
  for (std::size_t k = 0; k < lag_grid.size(); ++k)
    if (!(lag_grid[k] >= 0.0) || (k > 0 && !(lag_grid[k] > lag_grid[k - 1])))
      throw std::invalid_argument("lag grid must be nonnegative and increasing");
  const double smax = lag_grid.back();
  if (!(T_obs > smax)) throw std::invalid_argument("observation window must exceed the largest lag");
  if (replicates < 2) throw std::invalid_argument("need at least 2 replicates");

  ReducedCovarianceProfile prof;
  prof.lags.assign(lag_grid.begin(), lag_grid.end());
  prof.discrete_time = is_discrete_time(spec);
  const double window = prof.discrete_time ? std::floor(T_obs - smax + 1e-9) : T_obs - smax;
  if (!(window > 0.0)) throw std::invalid_argument("observation window too short");

  Simulator sim(spec, T_obs);
  const std::size_t K = lag_grid.size();
  std::vector<std::vector<double>> per_rep(replicates, std::vector<double>(K, 0.0));
  double countA = 0.0, countB = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    Philox rng = replicate_rng(seed, r);
    Pattern pat = sim.simulate(rng);
    const std::size_t n = pat.size();
    std::vector<char> inA(n), inB(n);
    for (std::size_t i = 0; i < n; ++i) {
      inA[i] = A.contains(pat.location(i));
      inB[i] = B.contains(pat.location(i));
      countA += inA[i];
      countB += inB[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!inA[i] || pat.times[i] > T_obs - smax + 1e-12) continue;
      const double ti = pat.times[i];
      auto first = std::lower_bound(pat.times.begin(), pat.times.end(), ti);
      for (std::size_t j = static_cast<std::size_t>(first - pat.times.begin()); j < n; ++j) {
        const double lag = pat.times[j] - ti;
        if (lag > smax) break;
        if (j == i || !inB[j]) continue;
        auto pos = std::lower_bound(lag_grid.begin(), lag_grid.end(), lag);
        if (pos != lag_grid.end()) per_rep[r][static_cast<std::size_t>(pos - lag_grid.begin())] += 1.0;
      }
    }
    for (std::size_t k = 1; k < K; ++k) per_rep[r][k] += per_rep[r][k - 1];
    for (double& v : per_rep[r]) v /= window;
  }

  const double Rd = static_cast<double>(replicates);
  auto kA = known_intensity(spec, A);
  auto kB = known_intensity(spec, B);
  if (kA && kB) {
    prof.mu_known = true;
    prof.mu_A = *kA;
    prof.mu_B = *kB;
  } else {
    prof.mu_A = countA / (Rd * T_obs);
    prof.mu_B = countB / (Rd * T_obs);
  }
  for (std::size_t k = 0; k < K; ++k) {
    double mean = 0.0;
    for (const auto& v : per_rep) mean += v[k];
    mean /= Rd;
    double ss = 0.0;
    for (const auto& v : per_rep) ss += (v[k] - mean) * (v[k] - mean);
    const double s = lag_grid[k];
    const double leb = prof.discrete_time ? std::floor(s + 1e-9) + 1.0 : s;
    prof.value.push_back(mean - prof.mu_A * prof.mu_B * leb);
    prof.se.push_back(std::sqrt(ss / (Rd - 1.0) / Rd));
    prof.increment.push_back(k == 0 ? prof.value[0] : prof.value[k] - prof.value[k - 1]);
  }
  for (double inc : prof.increment) (inc > 0 ? prof.positive_part : prof.negative_part) += std::abs(inc);
  return prof;
}

}  // namespace krdist
