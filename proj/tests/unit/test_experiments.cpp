#include <gtest/gtest.h>

#include <cmath>

#include "krdist/experiments.hpp"

using namespace krdist;

namespace {

RateExperimentConfig small_poisson(std::size_t dim = 1) {
  RateExperimentConfig c;
  c.process = PoissonSpec{SpatialLaw::uniform(Box::unit(dim)), 1.0};
  c.params = {1.0, 1.0};
  c.t_grid = {16, 32, 64, 128};
  c.replicates = 30;
  c.seed = 17;
  c.proxy_per_axis = 128;
  c.alpha_override = 1.0;
  return c;
}

}  // namespace

TEST(TheorySlope, Regimes) {
  std::string regime;
  EXPECT_DOUBLE_EQ(theory_rate_slope(1.0, 0.0, 1.0, &regime), -0.5);
  EXPECT_EQ(regime, "alpha<2p");
  EXPECT_DOUBLE_EQ(theory_rate_slope(3.0, 0.0, 1.0, &regime), -1.0 / 3.0);
  EXPECT_EQ(regime, "alpha>2p");
  EXPECT_DOUBLE_EQ(theory_rate_slope(2.0, 0.5, 1.0, &regime), -0.25);
  EXPECT_EQ(regime, "alpha=2p");
  EXPECT_DOUBLE_EQ(theory_rate_slope(1.0, 0.5, 2.0), -0.125);
}

TEST(LowerBoundAudit, Examples) {
  EXPECT_DOUBLE_EQ(component_bound_constant(1.0, 3.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(component_bound_constant(1.0, 0.2, 1.0), 0.1);
  KrdParams prm{1.0, 1.0};
  std::vector<AuditRecord> ok{{0.25, 1.5, {}, {}}, {0.0, 1.0, {}, {}}};
  EXPECT_EQ(lower_bound_audit(ok, 1.0, prm).violations, 0u);
  std::vector<AuditRecord> bad{{0.25, 1.5, {}, {}}, {0.1, 1.5, {}, {}}};
  auto a = lower_bound_audit(bad, 1.0, prm);
  EXPECT_EQ(a.violations, 1u);
  EXPECT_EQ(a.violating, (std::vector<std::size_t>{1}));

  std::vector<AuditRecord> comp{{0.5, 1.0, 0.0, 1.0}, {0.1, 1.0, 0.0, 1.0}};
  auto c = lower_bound_audit(comp, 1.0, prm, ComponentSplit{0.5, 0.5, 3.0});
  EXPECT_EQ(c.component_checked, 2u);
  EXPECT_EQ(c.component_violations, 1u);
  EXPECT_DOUBLE_EQ(c.component_constant, 0.5);
}

TEST(LowerBoundAudit, ComponentConstantIsTight) {
  // Unit masses at 0 and delta; the estimate moves all mass to 0. Then
  // KR = min(delta, C) while the mass gaps sum to 2, so the constant cannot
  // exceed min(delta, C) / 2 for p = 1.
  for (double delta : {0.1, 0.4, 0.9, 2.0}) {
    auto s = std::make_shared<const PointSet>(PointSet::from_coordinates(1, {0.0, delta}));
    DiscreteMeasure mu(s, {{0, 1.0}, {1, 1.0}}), est(s, {{0, 2.0}});
    const double v = krd_value(est, mu, {1.0, 1.0});
    EXPECT_NEAR(v, std::min(delta, 1.0), 1e-12);
    EXPECT_LE(component_bound_constant(1.0, delta, 1.0) * 2.0, v + 1e-12);
  }
}

TEST(RateExperiment, ReportStructureAndAudit) {
  RateExperimentConfig c = small_poisson();
  RateReport rep = run_rate_experiment(c);
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_TRUE(rep.cap_ok);
  EXPECT_EQ(rep.lower_bound_violations, 0u);
  EXPECT_TRUE(rep.alpha_overridden);
  EXPECT_EQ(rep.regime, "alpha<2p");
  EXPECT_EQ(rep.krd_values.size(), 4u * 30u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.n_rep, 30u);
    EXPECT_LE(r.mean_krd, r.cap + 3.0 * r.se);
    EXPECT_DOUBLE_EQ(r.cap, 2.0);
  }
  // Tail means are nonincreasing up to noise.
  for (std::size_t k = 2; k < rep.rows.size(); ++k)
    EXPECT_LE(rep.rows[k].mean_krd, rep.rows[k - 1].mean_krd + 3.0 * (rep.rows[k].se + rep.rows[k - 1].se));
  EXPECT_LT(rep.slope, 0.0);
  EXPECT_LE(rep.ci_low, rep.slope);
  EXPECT_GE(rep.ci_high, rep.slope);

  std::string csv = format_rate_csv(rep);
  EXPECT_EQ(csv.rfind("t,mean_krd,se,n_rep,cap,slope_so_far\n", 0), 0u);
  EXPECT_NE(csv.find("\"theory_slope\""), std::string::npos);
  EXPECT_NE(csv.find("\"verdict\""), std::string::npos);
}

TEST(RateExperiment, ReproducibleAndThreadIndependent) {
  RateExperimentConfig c = small_poisson();
  c.t_grid = {16, 32, 64};
  std::string a = format_rate_csv(run_rate_experiment(c));
  std::string b = format_rate_csv(run_rate_experiment(c));
  c.threads = 3;
  std::string d = format_rate_csv(run_rate_experiment(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  c.seed = 18;
  EXPECT_NE(a, format_rate_csv(run_rate_experiment(c)));
}

TEST(RateExperiment, SkipsOversizedInstances) {
  RateExperimentConfig c = small_poisson();
  c.max_instance = 129 * 40;
  RateReport rep = run_rate_experiment(c);
  EXPECT_FALSE(rep.skipped.empty());
  for (const auto& s : rep.skipped) EXPECT_GE((s.atoms + 1) * 129, c.max_instance);
}

TEST(RateExperiment, ValidatesConfig) {
  RateExperimentConfig c = small_poisson();
  c.replicates = 10;
  EXPECT_THROW(run_rate_experiment(c), std::invalid_argument);
  c = small_poisson();
  c.t_grid = {4, 2};
  EXPECT_THROW(run_rate_experiment(c), std::invalid_argument);
  c = small_poisson();
  c.bootstrap = 50;
  EXPECT_THROW(run_rate_experiment(c), std::invalid_argument);
}

TEST(TwoSample, SymmetricAndConsistent) {
  RateExperimentConfig a = small_poisson();
  a.t_grid = {16, 32, 64};
  RateExperimentConfig b = a;
  b.process = PoissonSpec{SpatialLaw::gaussian_mixture(Box::unit(1), {{1.0, {0.3}, 0.1}}), 1.0};
  std::string ab = format_rate_csv(two_sample_experiment(a, b));
  std::string ba = format_rate_csv(two_sample_experiment(b, a));
  EXPECT_EQ(ab, ba);

  RateReport same = two_sample_experiment(a, a);
  for (double v : same.krd_values) EXPECT_GE(v, 0.0);
  EXPECT_LT(same.rows.back().mean_krd, same.rows.front().mean_krd);
}

TEST(CRegime, SlopeInC) {
  RateExperimentConfig c = small_poisson();
  c.proxy_per_axis = 512;
  std::vector<double> C{0.02, 0.04, 0.08};
  CRegimeReport rep = c_regime_experiment(c, C, 256.0);
  EXPECT_DOUBLE_EQ(rep.theory_slope, 0.5);
  EXPECT_NEAR(rep.slope, rep.theory_slope, 0.25);
  for (std::size_t k = 1; k < C.size(); ++k) EXPECT_GE(rep.mean_krd[k], rep.mean_krd[k - 1]);
}
