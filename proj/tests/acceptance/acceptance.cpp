// Acceptance runner: one PASS/FAIL line per criterion.
//
//   krdist_acceptance --criterion 7 --cli build/tools/krdist --data data --workdir /tmp/acc
//
// Criteria 7 and 8 store their per-replicate (krd, mass) records in the work
// directory; criterion 11 audits those records when they are present and
// recomputes them otherwise.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "krdist/diagnostics.hpp"
#include "krdist/experiments.hpp"
#include "krdist/krd.hpp"
#include "krdist/ot_solver.hpp"
#include "krdist/process_config.hpp"
#include "krdist/stpp.hpp"
#include "krdist/tree_krd.hpp"

namespace fs = std::filesystem;
using namespace krdist;

namespace {

struct Context {
  std::string cli;
  fs::path data;
  fs::path work;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// ---------------------------------------------------------------- corpora

struct PlanRecord {
  const PointSet* space;
  UnbalancedPlan plan;
  double C;
};

struct MetricStats {
  std::size_t triples = 0;
  double sym = 0.0, ident = 0.0, tri = 0.0;
  std::size_t zero_for_distinct = 0;
};

// Random triples of measures with at most 20 atoms. Every plan computed is
// handed to `sink`.
MetricStats metric_corpus(const std::function<void(const PlanRecord&)>& sink) {
  gen::Gen g(0xC0FFEE);
  MetricStats st;
  std::vector<std::shared_ptr<const PointSet>> keep;
  for (int rep = 0; rep < 240; ++rep) {
    auto s = rep % 3 == 0 ? g.lattice_space(30, 2, 5) : g.space(30, 1 + rep % 3);
    keep.push_back(s);
    DiscreteMeasure a = g.measure(s, 20), b = g.measure(s, 20), c = g.measure(s, 20);
    KrdParams prm{1.0 + static_cast<double>(g.index(0, 2)) + (g.coin() ? g.real(0.0, 1.0) : 0.0),
                  g.real(0.05, 1.5) * (s->diameter() > 0 ? s->diameter() : 1.0)};
    auto run = [&](const DiscreteMeasure& x, const DiscreteMeasure& y) {
      KrdResult r = krd(x, y, prm);
      sink({s.get(), r.plan, prm.C});
      return r.value;
    };
    const double ab = run(a, b), ba = run(b, a), bc = run(b, c), ac = run(a, c), aa = run(a, a);
    st.sym = std::max(st.sym, std::abs(ab - ba));
    st.ident = std::max(st.ident, std::abs(aa));
    st.tri = std::max(st.tri, ac - ab - bc);
    const bool distinct = a.dense() != b.dense();
    if (distinct && !(ab > 0.0)) ++st.zero_for_distinct;
    ++st.triples;
  }
  return st;
}

struct RegimeStats {
  std::size_t tv_cases = 0, w_cases = 0;
  double tv_err = 0.0, w_err = 0.0, scale_err = 0.0, self_scale_err = 0.0;
  double sandwich_low = 0.0, sandwich_high = 0.0;  // largest violation
  std::size_t sup_tv_mismatch = 0;
};

RegimeStats regime_corpus(const std::function<void(const PlanRecord&)>& sink) {
  gen::Gen g(0xBEEF);
  RegimeStats st;
  std::vector<std::shared_ptr<const PointSet>> keep;
  auto common = [&](const DiscreteMeasure& a, const DiscreteMeasure& b, const KrdParams& prm, double value) {
    const double p = prm.p, Cp2 = std::pow(prm.C, p) / 2.0, vp = std::pow(value, p);
    const double ma = a.total_mass(), mb = b.total_mass();
    st.sandwich_low = std::max(st.sandwich_low, (Cp2 * std::abs(ma - mb) - vp) / std::max(1.0, vp));
    st.sandwich_high = std::max(st.sandwich_high, (vp - Cp2 * (ma + mb)) / std::max(1.0, vp));
    const double t = g.real(0.05, 20.0);
    KrdResult scaled = krd(a.scale(t), b.scale(t), prm);
    sink({&a.space(), scaled.plan, prm.C});
    st.scale_err = std::max(st.scale_err, rel_diff(scaled.value, std::pow(t, 1.0 / p) * value));
    KrdResult self = krd(a, a.scale(t), prm);
    sink({&a.space(), self.plan, prm.C});
    st.self_scale_err = std::max(st.self_scale_err, rel_diff(std::pow(self.value, p), Cp2 * ma * std::abs(1.0 - t)));
  };
  for (int rep = 0; rep < 120; ++rep) {
    // TV regime: C at most the smallest distance between distinct support points.
    auto s = g.space(12, 1 + rep % 3);
    keep.push_back(s);
    DiscreteMeasure a = g.measure(s, 10), b = g.measure(s, 10);
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& x : a.atoms())
      for (const auto& y : b.atoms())
        if (x.index != y.index) dmin = std::min(dmin, s->distance(x.index, y.index));
    if (!std::isfinite(dmin)) dmin = 1.0;
    KrdParams prm{g.real(1.0, 4.0), dmin * (rep % 4 == 0 ? 1.0 : g.real(0.05, 1.0))};
    KrdResult r = krd(a, b, prm);
    sink({s.get(), r.plan, prm.C});
    const double expect = std::pow(prm.C, prm.p) / 2.0 * tv_norm(a, b);
    st.tv_err = std::max(st.tv_err, rel_diff(std::pow(r.value, prm.p), expect));
    const double sup_form = std::pow(prm.C, prm.p) / 2.0 * tv_distance(a, b);
    if (rel_diff(std::pow(r.value, prm.p), sup_form) > 1e-8) ++st.sup_tv_mismatch;
    ++st.tv_cases;
    common(a, b, prm, r.value);
  }
  for (int rep = 0; rep < 120; ++rep) {
    // Wasserstein regime: equal masses, C at least the largest support distance.
    auto s = g.space(15, 1 + rep % 3);
    keep.push_back(s);
    DiscreteMeasure a = g.measure(s, 10), b = g.with_mass(g.measure(s, 10), a.total_mass());
    double dmax = 0.0;
    for (const auto& x : a.atoms())
      for (const auto& y : b.atoms()) dmax = std::max(dmax, s->distance(x.index, y.index));
    const double p = g.real(1.0, 4.0);
    KrdParams prm{p, std::max(dmax, 1e-3) * (rep % 4 == 0 ? 1.0 : g.real(1.0, 3.0))};
    KrdResult r = krd(a, b, prm);
    sink({s.get(), r.plan, prm.C});
    st.w_err = std::max(st.w_err, rel_diff(r.value, wasserstein(a, b, p)));
    ++st.w_cases;
    common(a, b, prm, r.value);
  }
  return st;
}

// ---------------------------------------------------------------- 1 to 6

Outcome criterion1(const Context&) {
  auto t0 = std::chrono::steady_clock::now();
  gen::Gen g(1);
  std::size_t cases = 0, bad = 0;
  double worst = 0.0;
  for (; cases < 600; ++cases) {
    const std::size_t n = g.index(1, 4), m = g.index(1, 4);
    // Rational weights: integer units of 1/12 split across the nodes.
    const std::size_t units = g.index(std::max(n, m), 24);
    std::vector<double> a(n, 0.0), b(m, 0.0);
    for (std::size_t k = 0; k < units; ++k) a[g.index(0, n - 1)] += 1.0 / 12.0;
    for (std::size_t k = 0; k < units; ++k) b[g.index(0, m - 1)] += 1.0 / 12.0;
    CostMatrix c(n, m);
    for (double& x : c.data) x = g.coin(0.3) ? static_cast<double>(g.index(0, 4)) : g.rational(40, 7);
    const double ours = solve_balanced(a, b, c).objective;
    const double ref = oracle::transport_by_vertices(a, b, c.data);
    const double err = std::abs(ours - ref) / std::max(1.0, std::abs(ref));
    worst = std::max(worst, err);
    if (err > 1e-9) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 60.0, fmt("%zu instances, %zu mismatches, max rel err %.2e, %.1fs", cases, bad, worst, secs)};
}

Outcome criterion2(const Context&) {
  auto t0 = std::chrono::steady_clock::now();
  MetricStats st = metric_corpus([](const PlanRecord&) {});
  const double secs = seconds_since(t0);
  const bool ok = st.triples >= 200 && st.sym <= 1e-8 && st.ident <= 1e-8 && st.tri <= 1e-8 &&
                  st.zero_for_distinct == 0 && secs < 120.0;
  return {ok, fmt("%zu triples, max |d(a,b)-d(b,a)| %.2e, max d(a,a) %.2e, max triangle excess %.2e, "
                  "zero distance for distinct %zu, %.1fs",
                  st.triples, st.sym, st.ident, st.tri, st.zero_for_distinct, secs)};
}

Outcome criterion3(const Context&) {
  RegimeStats st = regime_corpus([](const PlanRecord&) {});
  const bool ok = st.tv_cases >= 100 && st.w_cases >= 100 && st.tv_err <= 1e-8 && st.w_err <= 1e-8 &&
                  st.scale_err <= 1e-8 && st.self_scale_err <= 1e-8 && st.sandwich_low <= 1e-10 &&
                  st.sandwich_high <= 1e-10;
  return {ok, fmt("TV regime %zu cases max rel err %.2e (TV as |mu-nu|(X); sup_B form differs on %zu); "
                  "Wasserstein regime %zu cases max rel err %.2e; scaling %.2e; KR^p(mu,a mu) %.2e; "
                  "sandwich excess %.1e/%.1e",
                  st.tv_cases, st.tv_err, st.sup_tv_mismatch, st.w_cases, st.w_err, st.scale_err,
                  st.self_scale_err, st.sandwich_low, st.sandwich_high)};
}

Outcome criterion4(const Context&) {
  std::size_t plans = 0, entries = 0, bad = 0;
  double bad_mass = 0.0, longest_ratio = 0.0;
  auto sink = [&](const PlanRecord& r) {
    ++plans;
    for (const auto& e : r.plan.entries) {
      ++entries;
      const double d = r.space->distance(e.src, e.dst);
      longest_ratio = std::max(longest_ratio, d / r.C);
      if (d > r.C + 1e-9 && e.mass > 0.0) {
        ++bad;
        bad_mass += e.mass;
      }
    }
  };
  metric_corpus(sink);
  regime_corpus(sink);
  return {bad == 0, fmt("%zu plans, %zu transport entries, %zu over distance > C (mass %.2e), max d/C %.6f", plans,
                        entries, bad, bad_mass, longest_ratio)};
}

Outcome criterion5(const Context&) {
  gen::Gen g(5);
  std::size_t cases = 0;
  double worst = 0.0;
  for (; cases < 150; ++cases) {
    auto s = g.space(20, 1 + cases % 3);
    DiscreteMeasure a = g.measure(s, 12), b = g.measure(s, 12);
    if (cases % 10 == 0) b = b.scale(g.real(0.0, 5.0));
    KrdParams prm{g.real(1.0, 4.0), g.real(0.05, 1.5)};
    const double m = std::max(a.total_mass(), b.total_mass());
    const double K[] = {m, 2.0 * m, 10.0 * m};
    worst = std::max(worst, krd_value_independent_of_K(a, b, prm, K).max_relative_spread);
  }
  return {worst <= 1e-8, fmt("%zu instances, K in {m, 2m, 10m}, max relative spread %.2e", cases, worst)};
}

Outcome criterion6(const Context&) {
  gen::Gen g(6);
  std::size_t cases = 0, v_disc = 0, v_tree = 0;
  double slack_disc = std::numeric_limits<double>::infinity(), slack_tree = slack_disc;
  for (; cases < 300; ++cases) {
    auto s = cases % 4 == 0 ? g.lattice_space(40, 2, 6) : g.space(40, 1 + cases % 3);
    DiscreteMeasure a = g.measure(s, 15), b = g.measure(s, 15);
    const double D = std::max(s->diameter(), 1e-9);
    const double eps = D * std::exp(g.real(std::log(0.02), std::log(1.5)));
    KrdParams prm{g.real(1.0, 3.0), D * g.real(0.02, 2.0)};
    SandwichReport r = discretization_sandwich(a, b, eps, prm);
    // Recheck both inequalities here rather than trusting the report flags.
    const double e_disc = std::pow(r.exact, prm.p), e_tree = std::pow(r.projected_exact, prm.p);
    const bool ok_disc = e_disc <= r.discretization_bound * (1 + 1e-9) + 1e-12;
    const bool ok_tree = e_tree <= r.tree_bound * (1 + 1e-9) + 1e-12;
    if (!ok_disc || !r.discretization_holds) ++v_disc;
    if (!ok_tree || !r.tree_holds) ++v_tree;
    if (r.discretization_bound > 0) slack_disc = std::min(slack_disc, r.discretization_bound / std::max(e_disc, 1e-300));
    if (r.tree_bound > 0) slack_tree = std::min(slack_tree, r.tree_bound / std::max(e_tree, 1e-300));
  }
  return {v_disc == 0 && v_tree == 0, fmt("%zu triples, discretisation violations %zu, tree violations %zu, "
                                    "min bound/value %.3f and %.3f",
                                    cases, v_disc, v_tree, slack_disc, slack_tree)};
}

// ---------------------------------------------------------------- rate experiments

struct RateRun {
  RateReport report;
  double seconds = 0.0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fingerprint(const fs::path& config) {
  return std::to_string(std::hash<std::string>{}(slurp(config) + __DATE__ __TIME__));
}

void store_records(const Context& ctx, const std::string& name, const fs::path& config, const RateReport& rep) {
  std::ofstream out(ctx.work / (name + ".records"));
  out << fingerprint(config) << ' ' << rep.m_mu << '\n';
  char buf[80];
  for (std::size_t i = 0; i < rep.krd_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", rep.krd_values[i], rep.masses[i]);
    out << buf;
  }
}

bool load_records(const Context& ctx, const std::string& name, const fs::path& config, std::vector<AuditRecord>& recs,
                  double& m_mu) {
  std::ifstream in(ctx.work / (name + ".records"));
  std::string fp;
  if (!(in >> fp >> m_mu) || fp != fingerprint(config)) return false;
  double v, m;
  while (in >> v >> m)
    if (!std::isnan(v)) recs.push_back({v, m, {}, {}});
  return true;
}

RateRun run_config(const Context& ctx, const std::string& name, const fs::path& config) {
  KvDocument doc = KvDocument::load(config.string());
  RateExperimentConfig cfg = parse_rate_config(doc);
  doc.finish();
  auto t0 = std::chrono::steady_clock::now();
  RateRun run{run_rate_experiment(cfg), 0.0};
  run.seconds = seconds_since(t0);
  std::ofstream(ctx.work / (name + ".csv")) << format_rate_csv(run.report);
  store_records(ctx, name, config, run.report);
  return run;
}

Outcome rate_criterion(const Context& ctx, const std::string& name, double lo, double hi, double max_t,
                       std::size_t min_reps) {
  const fs::path config = ctx.data / (name + ".ini");
  RateRun run = run_config(ctx, name, config);
  const RateReport& r = run.report;
  bool grid_ok = !r.rows.empty() && r.rows.back().t == max_t;
  for (const auto& row : r.rows) grid_ok = grid_ok && row.n_rep >= min_reps;
  const bool ok = grid_ok && r.skipped.empty() && r.slope >= lo && r.slope <= hi && run.seconds < 1800.0;
  std::string notes;
  for (const auto& n : r.notes) notes += "; " + n;
  return {ok, fmt("slope %.4f in [%.2f, %.2f] (bootstrap 95%% CI [%.4f, %.4f], theory %.4f from alpha_hat %.3f), "
                  "%zu t values x %zu reps, proxy %zu atoms mesh %.2e, cap_ok %d, %.0fs%s",
                  r.slope, lo, hi, r.ci_low, r.ci_high, r.theory_slope, r.alpha, r.rows.size(),
                  r.rows.empty() ? 0 : r.rows.front().n_rep, r.proxy_atoms, r.proxy_mesh, r.cap_ok ? 1 : 0,
                  run.seconds, notes.c_str())};
}

Outcome criterion7(const Context& ctx) { return rate_criterion(ctx, "rates_poisson_1d", -0.62, -0.38, 4096, 100); }
Outcome criterion8(const Context& ctx) { return rate_criterion(ctx, "rates_poisson_3d", -0.45, -0.22, 2048, 100); }

// ---------------------------------------------------------------- 9 and 10

Outcome criterion9(const Context&) {
  HawkesSpec spec{SpatialLaw::uniform(Box::unit(1)), 1.0, 0.5, 1.0, HawkesKernel::Uniform, 0.05};
  const double T = 200.0;
  const std::size_t R = 500;
  Simulator sim(spec, T);
  double s = 0.0, s2 = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    Philox rng = replicate_rng(0x4A3C, r);
    const double rate = static_cast<double>(sim.simulate(rng).size()) / T;
    s += rate;
    s2 += rate * rate;
  }
  const double mean = s / R, se = std::sqrt((s2 - s * s / R) / (R - 1) / R);
  const bool rate_ok = std::abs(mean - 2.0) <= 3.0 * se;

  // Offspring intensity of one ancestor: histogram of all descendant times.
  const double width = 0.25, smax = 8.0;
  const std::size_t bins = static_cast<std::size_t>(smax / width);
  std::vector<double> hist(bins, 0.0);
  const std::size_t clusters = 200000;
  Philox rng(0x4A3D, 0);
  for (std::size_t c = 0; c < clusters; ++c)
    for (double t : simulate_hawkes_cluster(spec, smax, rng))
      if (t < smax) hist[static_cast<std::size_t>(t / width)] += 1.0;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < bins; ++k) {
    if (hist[k] <= 0.0) continue;
    // Bin average of alpha e^{-(beta-alpha)s} is exponential at the bin's
    // log-mean point; the midpoint shift cancels in the slope.
    x.push_back((static_cast<double>(k) + 0.5) * width);
    y.push_back(std::log(hist[k] / static_cast<double>(clusters) / width));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = std::exp((sy - slope * sx) / n);
  const double target = -(spec.beta - spec.alpha);
  const bool slope_ok = std::abs(slope - target) <= 0.2 * std::abs(target);
  return {rate_ok && slope_ok,
          fmt("rate %.4f +- %.4f (target 2, %zu reps on (0,%g]); offspring log-slope %.4f (target %.2f +- 20%%), "
              "fitted alpha %.3f",
              mean, se, R, T, slope, target, intercept)};
}

Outcome criterion10(const Context&) {
  struct Case {
    const char* name;
    ProcessSpec spec;
    Partition part;
    std::vector<double> grid;
    std::size_t reps;
    double lo, hi;
  };
  LgcpSpec lg;
  lg.dim = 1;
  lg.grid = 2;
  lg.kernel = TemporalKernel::RationalQuadratic;
  lg.rq_a = 0.25;
  const SpatialLaw unit = SpatialLaw::uniform(Box::unit(1));
  std::vector<Case> cases{
      {"poisson", PoissonSpec{unit, 1.0}, covering_partition(Box::unit(1), 0.25), geometric_grid(16, 2048, 8), 1000,
       -0.1, 0.1},
      {"renewal_pareto(1.5)", RenewalParetoSpec{unit, 1.5, 1.0}, whole_space_partition(1),
       geometric_grid(16, 16384, 11), 2000, 0.35, 0.65},
      {"lgcp_rq(a=0.25)", lg, Partition{PointSet::from_coordinates(1, {0.25, 0.75})}, geometric_grid(64, 2048, 6),
       1000, 0.35, 0.65},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    VarianceProfile prof = partitioned_variance(c.spec, c.part, c.grid, c.reps, 0x5EED + c.reps);
    GrowthFit f = fit_growth(prof);
    const bool pass = f.beta_hat >= c.lo && f.beta_hat <= c.hi;
    ok = ok && pass;
    detail += fmt("%s%s beta_hat %.3f in [%.2f, %.2f] (%zu reps, %zu cells, r2 %.3f)", detail.empty() ? "" : "; ",
                  c.name, f.beta_hat, c.lo, c.hi, c.reps, prof.n_cells, f.r2);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 11 and 12

Outcome criterion11(const Context& ctx) {
  std::size_t checked = 0, violations = 0;
  std::string detail;
  for (const std::string name : {"rates_poisson_1d", "rates_poisson_3d", "rates_quick"}) {
    const fs::path config = ctx.data / (name + ".ini");
    std::vector<AuditRecord> recs;
    double m_mu = 0.0;
    const bool cached = load_records(ctx, name, config, recs, m_mu);
    if (!cached) {
      RateRun run = run_config(ctx, name, config);
      recs.clear();
      if (!load_records(ctx, name, config, recs, m_mu)) return {false, "could not reload records for " + name};
    }
    KvDocument doc = KvDocument::load(config.string());
    RateExperimentConfig cfg = parse_rate_config(doc);
    LowerBoundAudit a = lower_bound_audit(recs, m_mu, cfg.params);
    checked += a.checked;
    violations += a.violations;
    detail += fmt("%s%s %zu/%zu%s", detail.empty() ? "" : ", ", name.c_str(), a.violations, a.checked,
                  cached ? " (cached)" : "");
  }
  return {checked > 0 && violations == 0,
          fmt("%zu violations of KR >= (C/2)|m_hat - m|^(1/p) in %zu replicate values [", violations, checked) + detail +
              "]"};
}

Outcome criterion12(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  const fs::path dir = ctx.work / "repro";
  fs::create_directories(dir);
  const std::string cli = ctx.cli, d = ctx.data.string();
  struct Cmd {
    std::string name, args;
  };
  std::vector<Cmd> cmds;
  for (const char* spec : {"poisson_1d", "poisson_3d", "binomial", "hawkes", "neyman_scott", "matern", "lgcp_rq",
                           "pareto", "gaussian_mixture"})
    cmds.push_back({std::string("simulate_") + spec,
                    "simulate --spec " + d + "/" + spec + ".ini --T 50 --seed 11 --out {OUT}"});
  cmds.push_back({"variance", "variance --spec " + d +
                                  "/hawkes.ini --partition-eps 0.3 --tmax 64 --grid geometric:5 --replicates 60 "
                                  "--seed 5 --out {OUT}"});
  cmds.push_back({"rates", "rates --config " + d + "/rates_quick.ini --out {OUT}"});
  cmds.push_back({"twosample", "twosample --config " + d + "/twosample.ini --out {OUT}"});
  cmds.push_back({"rcov", "rcov --spec " + d + "/matern.ini --lags 0.25,0.5,1 --T 100 --replicates 50 --seed 2 --out {OUT}"});
  cmds.push_back({"krd", "krd --mu " + d + "/mu.measure --nu " + d + "/nu.measure --p 2 --C 0.8 --points " + d +
                             "/points_line.txt --plan {OUT}"});
  cmds.push_back({"treebound", "treebound --mu " + d + "/mu.measure --nu " + d + "/nu.measure --eps 0.3 --p 1 --C 1 "
                                   "--points " + d + "/points_line.txt > {OUT}"});
  std::size_t same = 0;
  std::vector<std::string> differing, failing;
  for (const auto& c : cmds) {
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (c.name + "." + std::to_string(k));
      fs::remove(out);
      std::string args = c.args;
      args.replace(args.find("{OUT}"), 5, out.string());
      const std::string line = "\"" + cli + "\" " + args + (args.find('>') == std::string::npos ? " > /dev/null" : "");
      if (std::system(line.c_str()) != 0) failing.push_back(c.name);
      outs[k] = slurp(out);
    }
    if (!outs[0].empty() && outs[0] == outs[1])
      ++same;
    else
      differing.push_back(c.name);
  }
  // A different seed must change the output, or the comparison proves nothing.
  const fs::path other = dir / "simulate_other";
  const int rc =
      std::system(("\"" + cli + "\" simulate --spec " + d + "/poisson_1d.ini --T 50 --seed 12 --out " + other.string())
                      .c_str());
  const bool seed_matters = rc == 0 && slurp(other) != slurp(dir / "simulate_poisson_1d.0");
  std::string bad;
  for (const auto& n : differing) bad += " " + n;
  for (const auto& n : failing) bad += " failed:" + n;
  return {differing.empty() && failing.empty() && seed_matters,
          fmt("%zu/%zu commands byte-identical on rerun, different seed changes output: %s", same, cmds.size(),
              seed_matters ? "yes" : "no") +
              (bad.empty() ? "" : ";" + bad)};
}

const char* kTitles[] = {
    "",
    "exact solver matches vertex enumeration",
    "KRD metric axioms",
    "TV and Wasserstein regimes, scaling, sandwich",
    "plan truncation at distance C",
    "lifting independent of K",
    "discretisation and tree bounds",
    "Poisson rate d=1, p=1, C=1",
    "Poisson rate d=3, p=1, C=1",
    "Hawkes mean rate and offspring decay",
    "variance growth exponents",
    "plug-in mass lower bound audit",
    "CLI reproducibility",
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"krdist acceptance criteria"};
  std::string which = "all";
  Context ctx;
  std::string data = "data", work = "acceptance_work";
  app.add_option("--criterion", which, "1..12 or all");
  app.add_option("--cli", ctx.cli, "Path of the krdist executable");
  app.add_option("--data", data, "Directory with the sample inputs");
  app.add_option("--workdir", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  ctx.data = data;
  ctx.work = work;
  fs::create_directories(ctx.work);

  const std::function<Outcome(const Context&)> table[] = {
      nullptr,     criterion1, criterion2, criterion3,  criterion4,  criterion5, criterion6,
      criterion7,  criterion8, criterion9, criterion10, criterion11, criterion12,
  };
  std::vector<int> selected;
  if (which == "all") {
    for (int k = 1; k <= 12; ++k) selected.push_back(k);
  } else {
    const int k = std::atoi(which.c_str());
    if (k < 1 || k > 12) {
      std::cerr << "criterion must be 1..12 or all\n";
      return 2;
    }
    selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    Outcome o;
    try {
      o = table[k](ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("CRITERION %2d %s  %s: %s\n", k, o.pass ? "PASS" : "FAIL", kTitles[k], o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
