#include "krdist/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "krdist/diagnostics.hpp"
#include "krdist/metric_space.hpp"

namespace krdist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return kNaN;
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

// Log-log slope of `means` against t over rows [from, to).
double loglog_slope(const std::vector<double>& t, const std::vector<double>& means, std::size_t from,
                    std::size_t to) {
  std::vector<double> x, y;
  for (std::size_t k = from; k < to; ++k)
    if (means[k] > 0.0 && std::isfinite(means[k])) {
      x.push_back(std::log(t[k]));
      y.push_back(std::log(means[k]));
    }
  return ols_slope(x, y);
}

struct Target {
  PointSet points;
  std::vector<double> weights;  // carry the intensity mass
  double mesh = 0.0;
};

Target make_target(const RateExperimentConfig& cfg, double m) {
  auto law = intensity_law(cfg.process);
  if (!law) throw std::invalid_argument("process has no closed-form intensity law for a proxy");
  std::size_t per_axis = cfg.proxy_per_axis;
  const std::size_t d = law->dim();
  if (per_axis == 0 && law->kind() != SpatialLaw::Kind::Discrete) {
    const double nmax = std::max(1.0, m * cfg.t_grid.back());
    const double want = std::min(10.0 * nmax, std::max(256.0, 8e6 / nmax));
    per_axis = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::pow(want, 1.0 / static_cast<double>(d)))));
  }
  Proxy px = law->proxy(per_axis);
  Target tg;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < px.weights.size(); ++i)
    if (px.weights[i] > 0.0) {
      keep.push_back(i);
      tg.weights.push_back(px.weights[i] * m);
    }
  tg.points = subset(px.points, keep);
  tg.mesh = px.mesh;
  return tg;
}

// KR between the events of `pat` up to t (weights 1/t) and a target measure.
double krd_to_target(const Pattern& pat, double t, const Target& tg, const KrdParams& prm,
                     double* mass_hat, std::size_t* atoms) {
  DiscreteMeasure emp = empirical_measure(pat, t);
  *mass_hat = emp.total_mass();
  const std::size_t n = emp.support_size();
  *atoms = n;
  std::vector<double> coords;
  coords.reserve((n + tg.points.size()) * pat.dim);
  for (const Atom& a : emp.atoms()) {
    auto x = emp.space().point(a.index);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  coords.insert(coords.end(), tg.points.coordinates().begin(), tg.points.coordinates().end());
  auto space = std::make_shared<const PointSet>(PointSet::from_coordinates(pat.dim, std::move(coords)));
  std::vector<Atom> a, b;
  for (std::size_t i = 0; i < n; ++i) a.push_back({i, emp.atoms()[i].weight});
  for (std::size_t j = 0; j < tg.weights.size(); ++j) b.push_back({n + j, tg.weights[j]});
  return krd_value(DiscreteMeasure(space, std::move(a)), DiscreteMeasure(space, std::move(b)), prm);
}

// KR between two empirical measures.
double krd_between(const Pattern& pa, const Pattern& pb, double t, const KrdParams& prm) {
  DiscreteMeasure ea = empirical_measure(pa, t);
  DiscreteMeasure eb = empirical_measure(pb, t);
  std::vector<double> coords;
  for (const Atom& x : ea.atoms()) {
    auto p = ea.space().point(x.index);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  for (const Atom& x : eb.atoms()) {
    auto p = eb.space().point(x.index);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  const std::size_t n = ea.support_size();
  if (coords.empty()) return 0.0;
  auto space = std::make_shared<const PointSet>(PointSet::from_coordinates(pa.dim, std::move(coords)));
  std::vector<Atom> a, b;
  for (std::size_t i = 0; i < n; ++i) a.push_back({i, ea.atoms()[i].weight});
  for (std::size_t j = 0; j < eb.support_size(); ++j) b.push_back({n + j, eb.atoms()[j].weight});
  return krd_value(DiscreteMeasure(space, std::move(a)), DiscreteMeasure(space, std::move(b)), prm);
}

double target_krd(const Target& x, const Target& y, const KrdParams& prm) {
  auto space = std::make_shared<const PointSet>(concatenate(x.points, y.points));
  std::vector<Atom> a, b;
  for (std::size_t i = 0; i < x.weights.size(); ++i) a.push_back({i, x.weights[i]});
  for (std::size_t j = 0; j < y.weights.size(); ++j) b.push_back({x.weights.size() + j, y.weights[j]});
  return krd_value(DiscreteMeasure(space, std::move(a)), DiscreteMeasure(space, std::move(b)), prm);
}

// Runs body(r) for every replicate, optionally on several threads; results
// are written by replicate index so the outcome does not depend on timing.
template <class F>
void for_each_replicate(std::size_t replicates, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, replicates));
  if (threads == 1) {
    for (std::size_t r = 0; r < replicates; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < replicates; r = next++) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double estimate_alpha(const PointSet& pts, double mesh, std::vector<std::string>& notes) {
  if (pts.size() < 8) {
    notes.push_back("alpha: proxy too small for a covering fit, using 0");
    return 0.0;
  }
  const double diam = pts.has_coordinates() && pts.dim() > 0 ? [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < pts.dim(); ++k) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        lo = std::min(lo, pts.point(i)[k]);
        hi = std::max(hi, pts.point(i)[k]);
      }
      s += (hi - lo) * (hi - lo);
    }
    return std::sqrt(s);
  }()
                                                            : pts.diameter();
  const double lo = std::max(2.0 * mesh, diam / 64.0), hi = diam / 4.0;
  if (!(hi > lo)) {
    notes.push_back("alpha: support too coarse for a covering fit, using 0");
    return 0.0;
  }
  // Thin out very large proxies; the covering scaling is unaffected.
  PointSet sample = pts;
  if (pts.size() > 4096) {
    std::vector<std::size_t> idx;
    const std::size_t stride = (pts.size() + 4095) / 4096;
    for (std::size_t i = 0; i < pts.size(); i += stride) idx.push_back(i);
    sample = subset(pts, idx);
  }
  std::vector<double> grid = geometric_grid(lo, hi, 6);
  return covering_number_profile(sample, grid).alpha_hat;
}

void fill_rows(RateReport& rep, const RateExperimentConfig& cfg, double m, std::size_t R) {
  const std::size_t K = cfg.t_grid.size();
  const double p = cfg.params.p, C = cfg.params.C;
  const double cap = std::pow(2.0, 1.0 / p) * C * std::pow(m, 1.0 / p);
  std::vector<double> means(K);
  for (std::size_t k = 0; k < K; ++k) {
    RateRow row;
    row.t = cfg.t_grid[k];
    row.cap = cap;
    double s = 0.0, s2 = 0.0, merr = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < R; ++r) {
      double v = rep.krd_values[r * K + k];
      if (std::isnan(v)) continue;
      s += v;
      s2 += v * v;
      merr += std::abs(rep.masses[r * K + k] - m);
      ++n;
    }
    row.n_rep = n;
    if (n > 0) {
      row.mean_krd = s / static_cast<double>(n);
      row.mean_mass_error = merr / static_cast<double>(n);
      const double var = n > 1 ? std::max(0.0, (s2 - s * s / static_cast<double>(n)) / static_cast<double>(n - 1)) : 0.0;
      row.se = std::sqrt(var / static_cast<double>(n));
    } else {
      row.mean_krd = kNaN;
      row.mean_mass_error = kNaN;
    }
    means[k] = row.mean_krd;
    row.slope_so_far = loglog_slope(cfg.t_grid, means, 0, k + 1);
    if (n > 0 && row.mean_krd > cap + 3.0 * row.se) rep.cap_ok = false;
    rep.rows.push_back(row);
  }
  const std::size_t tail = K / 2;
  rep.slope = loglog_slope(cfg.t_grid, means, tail, K);
  std::vector<double> merr(K);
  for (std::size_t k = 0; k < K; ++k) merr[k] = rep.rows[k].mean_mass_error;
  rep.mass_slope = loglog_slope(cfg.t_grid, merr, tail, K);

  // Replicate bootstrap of the tail slope.
  Philox brng(derive_seed(cfg.seed, 0xB007), 0);
  std::vector<double> slopes;
  for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
    std::vector<double> s(K, 0.0);
    std::vector<std::size_t> c(K, 0);
    for (std::size_t i = 0; i < R; ++i) {
      const std::size_t r = static_cast<std::size_t>(brng() % R);
      for (std::size_t k = 0; k < K; ++k) {
        double v = rep.krd_values[r * K + k];
        if (std::isnan(v)) continue;
        s[k] += v;
        ++c[k];
      }
    }
    for (std::size_t k = 0; k < K; ++k) s[k] = c[k] ? s[k] / static_cast<double>(c[k]) : kNaN;
    double sl = loglog_slope(cfg.t_grid, s, tail, K);
    if (std::isfinite(sl)) slopes.push_back(sl);
  }
  std::sort(slopes.begin(), slopes.end());
  if (!slopes.empty()) {
    auto q = [&](double f) {
      double pos = f * static_cast<double>(slopes.size() - 1);
      std::size_t i = static_cast<std::size_t>(std::floor(pos));
      std::size_t j = std::min(i + 1, slopes.size() - 1);
      return slopes[i] + (pos - static_cast<double>(i)) * (slopes[j] - slopes[i]);
    };
    rep.ci_low = q(0.025);
    rep.ci_high = q(0.975);
  } else {
    rep.ci_low = rep.ci_high = kNaN;
  }
}

void decide(RateReport& rep, const RateExperimentConfig& cfg) {
  bool in_band;
  if (cfg.slope_min || cfg.slope_max) {
    const double lo = cfg.slope_min.value_or(-std::numeric_limits<double>::infinity());
    const double hi = cfg.slope_max.value_or(std::numeric_limits<double>::infinity());
    in_band = rep.slope >= lo && rep.slope <= hi;
  } else {
    in_band = std::abs(rep.slope - rep.theory_slope) <= cfg.slope_tolerance;
  }
  rep.pass = std::isfinite(rep.slope) && in_band && rep.cap_ok && rep.lower_bound_violations == 0;
  rep.verdict = rep.pass ? "PASS" : "FAIL";
}

void resolve_exponents(RateReport& rep, const RateExperimentConfig& cfg, const Target& tg, std::size_t R) {
  if (cfg.alpha_override) {
    rep.alpha = *cfg.alpha_override;
    rep.alpha_overridden = true;
    rep.notes.push_back("alpha overridden by config");
  } else {
    rep.alpha = estimate_alpha(tg.points, tg.mesh, rep.notes);
  }
  if (cfg.beta_override) {
    rep.beta = *cfg.beta_override;
    rep.beta_overridden = true;
    rep.notes.push_back("beta overridden by config");
  } else {
    // Growth of Var(N_t) over the replicates already simulated.
    const std::size_t K = cfg.t_grid.size();
    std::vector<double> var(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      double s = 0, s2 = 0;
      std::size_t n = 0;
      for (std::size_t r = 0; r < R; ++r) {
        double m = rep.masses[r * K + k];
        if (std::isnan(m)) continue;
        double N = m * cfg.t_grid[k];
        s += N;
        s2 += N * N;
        ++n;
      }
      var[k] = n > 1 ? (s2 - s * s / static_cast<double>(n)) / static_cast<double>(n - 1) : 0.0;
    }
    try {
      rep.beta = std::clamp(fit_growth(cfg.t_grid, var).beta_hat, 0.0, 0.999);
    } catch (const std::invalid_argument&) {
      rep.beta = 0.0;
      rep.notes.push_back("beta: variance fit unavailable, using 0");
    }
  }
  rep.theory_slope = theory_rate_slope(rep.alpha, rep.beta, cfg.params.p, &rep.regime);
}

}  // namespace

void RateExperimentConfig::validate() const {
  krdist::validate(process);
  params.validate();
  if (t_grid.empty()) throw std::invalid_argument("t_grid is empty");
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
      throw std::invalid_argument("t_grid must be positive and increasing");
  if (replicates < 30) throw std::invalid_argument("replicates must be at least 30");
  if (bootstrap < 200) throw std::invalid_argument("bootstrap must be at least 200");
  if (alpha_override && !(*alpha_override > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (beta_override && !(*beta_override >= 0.0 && *beta_override < 1.0))
    throw std::invalid_argument("beta must lie in [0, 1)");
}

double theory_rate_slope(double alpha, double beta, double p, std::string* regime) {
  const double two_p = 2.0 * p;
  if (std::abs(alpha - two_p) <= 1e-9) {
    if (regime) *regime = "alpha=2p";
    return -(1.0 - beta) / two_p;
  }
  if (alpha < two_p) {
    if (regime) *regime = "alpha<2p";
    return -(1.0 - beta) / two_p;
  }
  if (regime) *regime = "alpha>2p";
  return -(1.0 - beta) / alpha;
}

RateReport run_rate_experiment(const RateExperimentConfig& cfg) {
  cfg.validate();
  const double m = intensity_mass(cfg.process);
  const Target tg = make_target(cfg, m);
  const double proxy_mass = std::accumulate(tg.weights.begin(), tg.weights.end(), 0.0);
  if (std::abs(proxy_mass - m) > 1e-6 * std::max(1.0, m))
    throw std::logic_error("proxy mass does not match the intensity mass");

  RateReport rep;
  rep.m_mu = m;
  rep.proxy_mesh = tg.mesh;
  rep.proxy_atoms = tg.points.size();
  const double nmax = m * cfg.t_grid.back();
  if (static_cast<double>(rep.proxy_atoms) < 10.0 * nmax)
    rep.notes.push_back("proxy has fewer than 10x the largest expected event count");

  const std::size_t K = cfg.t_grid.size(), R = cfg.replicates;
  rep.krd_values.assign(R * K, kNaN);
  rep.masses.assign(R * K, kNaN);
  std::vector<std::vector<SkippedInstance>> skipped(R);
  Simulator sim(cfg.process, cfg.t_grid.back());

  for_each_replicate(R, cfg.threads, [&](std::size_t r) {
    Philox rng = replicate_rng(cfg.seed, r);
    Pattern pat = sim.simulate(rng);
    for (std::size_t k = 0; k < K; ++k) {
      const double t = cfg.t_grid[k];
      const std::size_t n = static_cast<std::size_t>(
          std::upper_bound(pat.times.begin(), pat.times.end(), t) - pat.times.begin());
      if (static_cast<double>(n + 1) * static_cast<double>(tg.points.size() + 1) >
          static_cast<double>(cfg.max_instance)) {
        skipped[r].push_back({t, r, n});
        continue;
      }
      double mass = 0.0;
      std::size_t atoms = 0;
      try {
        rep.krd_values[r * K + k] = krd_to_target(pat, t, tg, cfg.params, &mass, &atoms);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "krd failed at t=" << t << " replicate=" << r << " seed=" << cfg.seed << ": " << e.what();
        throw std::runtime_error(os.str());
      }
      rep.masses[r * K + k] = mass;
    }
  });
  for (auto& s : skipped) rep.skipped.insert(rep.skipped.end(), s.begin(), s.end());

  std::vector<AuditRecord> records;
  for (std::size_t i = 0; i < R * K; ++i)
    if (!std::isnan(rep.krd_values[i])) records.push_back({rep.krd_values[i], rep.masses[i], {}, {}});
  rep.lower_bound_violations = lower_bound_audit(records, m, cfg.params).violations;

  fill_rows(rep, cfg, m, R);
  resolve_exponents(rep, cfg, tg, R);
  decide(rep, cfg);
  return rep;
}

RateReport two_sample_experiment(const RateExperimentConfig& a_in, const RateExperimentConfig& b_in) {
  a_in.validate();
  b_in.validate();
  // Canonical order so that swapping the arguments reproduces the report.
  const RateExperimentConfig* first = &a_in;
  const RateExperimentConfig* second = &b_in;
  {
    std::ostringstream sa, sb;
    auto fp = [](std::ostringstream& os, const RateExperimentConfig& c) {
      os << process_name(c.process) << ':' << intensity_mass(c.process) << ':' << c.proxy_per_axis;
      if (auto law = intensity_law(c.process)) {
        Proxy px = law->proxy(8);
        for (double w : px.weights) os << ':' << w;
        for (double x : px.points.coordinates()) os << ':' << x;
      }
    };
    fp(sa, a_in);
    fp(sb, b_in);
    if (sb.str() < sa.str()) std::swap(first, second);
  }
  const RateExperimentConfig& cfg = a_in;
  const double ma = intensity_mass(first->process), mb = intensity_mass(second->process);
  const Target ta = make_target(*first, ma), tb = make_target(*second, mb);
  const double limit = target_krd(ta, tb, cfg.params);

  RateReport rep;
  rep.m_mu = std::max(ma, mb);
  rep.proxy_mesh = std::max(ta.mesh, tb.mesh);
  rep.proxy_atoms = ta.points.size() + tb.points.size();
  rep.notes.push_back("limit KR(mu_proxy, nu_proxy) = " + std::to_string(limit));
  const std::size_t K = cfg.t_grid.size(), R = cfg.replicates;
  rep.krd_values.assign(R * K, kNaN);
  rep.masses.assign(R * K, kNaN);
  Simulator sa(first->process, cfg.t_grid.back()), sb(second->process, cfg.t_grid.back());
  const std::uint64_t seed_a = derive_seed(cfg.seed, 1), seed_b = derive_seed(cfg.seed, 2);

  for_each_replicate(R, cfg.threads, [&](std::size_t r) {
    Philox ra = replicate_rng(seed_a, r), rb = replicate_rng(seed_b, r);
    Pattern pa = sa.simulate(ra), pb = sb.simulate(rb);
    for (std::size_t k = 0; k < K; ++k) {
      const double t = cfg.t_grid[k];
      const double na = static_cast<double>(std::upper_bound(pa.times.begin(), pa.times.end(), t) - pa.times.begin());
      const double nb = static_cast<double>(std::upper_bound(pb.times.begin(), pb.times.end(), t) - pb.times.begin());
      if ((na + 1.0) * (nb + 1.0) > static_cast<double>(cfg.max_instance)) continue;
      const double v = krd_between(pa, pb, t, cfg.params);
      rep.krd_values[r * K + k] = std::abs(v - limit);
      rep.masses[r * K + k] = na / t;
    }
  });
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 0; k < K; ++k)
      if (std::isnan(rep.krd_values[r * K + k])) rep.skipped.push_back({cfg.t_grid[k], r, 0});

  fill_rows(rep, cfg, rep.m_mu, R);
  RateReport ea, eb;
  ea.masses = eb.masses = std::vector<double>(R * K, kNaN);
  resolve_exponents(ea, *first, ta, 0);
  resolve_exponents(eb, *second, tb, 0);
  rep.alpha = std::max(ea.alpha, eb.alpha);
  rep.beta = std::max(ea.beta, eb.beta);
  rep.theory_slope = std::max(ea.theory_slope, eb.theory_slope);
  rep.regime = ea.theory_slope >= eb.theory_slope ? ea.regime : eb.regime;
  rep.alpha_overridden = ea.alpha_overridden && eb.alpha_overridden;
  rep.beta_overridden = ea.beta_overridden && eb.beta_overridden;
  decide(rep, cfg);
  return rep;
}

double component_bound_constant(double C, double delta, double p) {
  // Moving a unit across the gap repairs one unit of imbalance in each part,
  // so below the cutoff only 2^(-1/p) (delta ^ C) is guaranteed.
  if (delta >= C) return 0.5 * C;
  return std::min(0.5 * C, std::pow(2.0, -1.0 / p) * delta);
}

LowerBoundAudit lower_bound_audit(std::span<const AuditRecord> records, double m_mu,
                                  const KrdParams& params, const std::optional<ComponentSplit>& split) {
  params.validate();
  LowerBoundAudit audit;
  const double p = params.p, C = params.C;
  if (split) audit.component_constant = component_bound_constant(C, split->delta, p);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AuditRecord& rec = records[i];
    const double bound = 0.5 * C * std::pow(std::abs(rec.mass_hat - m_mu), 1.0 / p);
    bool bad = rec.krd < bound - 1e-9 * std::max(1.0, bound);
    ++audit.checked;
    if (bad) ++audit.violations;
    if (split && rec.component1_hat && rec.component2_hat) {
      ++audit.component_checked;
      const double s = std::abs(*rec.component1_hat - split->mu1) + std::abs(*rec.component2_hat - split->mu2);
      const double cb = audit.component_constant * std::pow(s, 1.0 / p);
      if (rec.krd < cb - 1e-9 * std::max(1.0, cb)) {
        ++audit.component_violations;
        bad = true;
      }
    }
    if (bad) audit.violating.push_back(i);
  }
  return audit;
}

CRegimeReport c_regime_experiment(const RateExperimentConfig& cfg, std::span<const double> C_grid, double t) {
  cfg.validate();
  if (C_grid.size() < 2) throw std::invalid_argument("C grid needs at least two values");
  const double m = intensity_mass(cfg.process);
  const Target tg = make_target(cfg, m);
  Simulator sim(cfg.process, t);
  const std::size_t R = cfg.replicates, K = C_grid.size();
  std::vector<double> vals(R * K, 0.0);
  for_each_replicate(R, cfg.threads, [&](std::size_t r) {
    Philox rng = replicate_rng(cfg.seed, r);
    Pattern pat = sim.simulate(rng);
    for (std::size_t k = 0; k < K; ++k) {
      KrdParams prm{cfg.params.p, C_grid[k]};
      double mass = 0.0;
      std::size_t atoms = 0;
      vals[r * K + k] = krd_to_target(pat, t, tg, prm, &mass, &atoms);
    }
  });
  CRegimeReport rep;
  rep.C.assign(C_grid.begin(), C_grid.end());
  std::vector<double> x, y;
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) s += vals[r * K + k];
    rep.mean_krd.push_back(s / static_cast<double>(R));
    x.push_back(std::log(C_grid[k]));
    y.push_back(std::log(rep.mean_krd.back()));
  }
  rep.slope = ols_slope(x, y);
  std::vector<std::string> notes;
  const double alpha = cfg.alpha_override ? *cfg.alpha_override : estimate_alpha(tg.points, tg.mesh, notes);
  rep.theory_slope = 1.0 - alpha / (2.0 * cfg.params.p);
  return rep;
}

std::string format_rate_csv(const RateReport& rep) {
  std::ostringstream os;
  char buf[256];
  os << "t,mean_krd,se,n_rep,cap,slope_so_far\n";
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%zu,%.10g,%.10g\n", r.t, r.mean_krd, r.se, r.n_rep, r.cap,
                  r.slope_so_far);
    os << buf;
  }
  auto num = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    char b[64];
    std::snprintf(b, sizeof b, "%.10g", v);
    return std::stod(b);
  };
  nlohmann::ordered_json s;
  s["slope"] = num(rep.slope);
  s["ci_low"] = num(rep.ci_low);
  s["ci_high"] = num(rep.ci_high);
  s["theory_slope"] = num(rep.theory_slope);
  s["verdict"] = rep.verdict;
  s["regime"] = rep.regime;
  s["alpha"] = num(rep.alpha);
  s["alpha_overridden"] = rep.alpha_overridden;
  s["beta"] = num(rep.beta);
  s["beta_overridden"] = rep.beta_overridden;
  s["mass_slope"] = num(rep.mass_slope);
  s["cap_ok"] = rep.cap_ok;
  s["lower_bound_violations"] = rep.lower_bound_violations;
  s["proxy_atoms"] = rep.proxy_atoms;
  s["proxy_mesh"] = num(rep.proxy_mesh);
  s["skipped"] = rep.skipped.size();
  s["notes"] = rep.notes;
  os << "\n" << s.dump(2) << "\n";
  return os.str();
}

}  // namespace krdist
