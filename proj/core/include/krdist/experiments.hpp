#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krdist/krd.hpp"
#include "krdist/stpp.hpp"

namespace krdist {

struct RateExperimentConfig {
  ProcessSpec process;
  KrdParams params;
  std::vector<double> t_grid;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  std::size_t proxy_per_axis = 0;  // 0 picks a resolution from the grid
  std::optional<double> alpha_override;
  std::optional<double> beta_override;
  std::size_t bootstrap = 200;
  double slope_tolerance = 0.12;  // verdict band around the theoretical slope
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::size_t max_instance = 40'000'000;  // skip instances with (N+1)(M+1) above this
  std::size_t threads = 1;

  void validate() const;
};

struct RateRow {
  double t = 0.0;
  double mean_krd = 0.0;
  double se = 0.0;
  std::size_t n_rep = 0;
  double cap = 0.0;
  double slope_so_far = 0.0;  // NaN until two rows exist
  double mean_mass_error = 0.0;  // mean |m_hat - m|
};

struct SkippedInstance {
  double t;
  std::size_t replicate;
  std::size_t atoms;
};

struct RateReport {
  std::vector<RateRow> rows;
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double theory_slope = 0.0;
  double mass_slope = 0.0;  // tail slope of mean |m_hat - m|
  double alpha = 0.0;
  double beta = 0.0;
  bool alpha_overridden = false;
  bool beta_overridden = false;
  std::string regime;  // "alpha<2p", "alpha>2p" or "alpha=2p"
  double proxy_mesh = 0.0;
  std::size_t proxy_atoms = 0;
  bool cap_ok = true;
  bool pass = false;
  std::string verdict;
  std::vector<SkippedInstance> skipped;
  std::vector<std::string> notes;
  // Per replicate and t (row-major replicate x t); NaN for skipped instances.
  std::vector<double> krd_values;
  std::vector<double> masses;
  double m_mu = 0.0;
  std::size_t lower_bound_violations = 0;
};

// Theoretical exponent of E KR(mu_hat_t, mu) in t.
double theory_rate_slope(double alpha, double beta, double p, std::string* regime = nullptr);

RateReport run_rate_experiment(const RateExperimentConfig& config);

// |KR(mu_hat_t, nu_hat_t) - KR(mu_proxy, nu_proxy)| for two processes. The
// params, grid, replicates and seed come from `a`.
RateReport two_sample_experiment(const RateExperimentConfig& a, const RateExperimentConfig& b);

struct AuditRecord {
  double krd = 0.0;
  double mass_hat = 0.0;
  std::optional<double> component1_hat;  // mu_hat(X_1)
  std::optional<double> component2_hat;  // mu_hat(X_2)
};

struct ComponentSplit {
  double mu1 = 0.0;    // mu(X_1)
  double mu2 = 0.0;    // mu(X_2)
  double delta = 0.0;  // distance between the two parts of the support
};

struct LowerBoundAudit {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t component_checked = 0;
  std::size_t component_violations = 0;
  double component_constant = 0.0;
  std::vector<std::size_t> violating;  // record positions
};

// Constant in front of (|dX_1| + |dX_2|)^(1/p) in the component bound.
double component_bound_constant(double C, double delta, double p);

LowerBoundAudit lower_bound_audit(std::span<const AuditRecord> records, double m_mu,
                                  const KrdParams& params,
                                  const std::optional<ComponentSplit>& split = std::nullopt);

struct CRegimeReport {
  std::vector<double> C;
  std::vector<double> mean_krd;
  double slope = 0.0;
  double theory_slope = 0.0;  // 1 - alpha / (2p)
};

// Mean KRD at a fixed t for several cutoffs using the same samples.
CRegimeReport c_regime_experiment(const RateExperimentConfig& config, std::span<const double> C_grid,
                                  double t);

std::string format_rate_csv(const RateReport& report);

}  // namespace krdist
