#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "krdist/diagnostics.hpp"
#include "krdist/experiments.hpp"
#include "krdist/io.hpp"
#include "krdist/krd.hpp"
#include "krdist/process_config.hpp"
#include "krdist/stpp.hpp"
#include "krdist/tree_krd.hpp"

namespace {

using namespace krdist;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

struct SpaceArgs {
  std::string points;
  std::string dmat;

  std::shared_ptr<const PointSet> load() const {
    if (points.empty() == dmat.empty()) throw std::invalid_argument("give exactly one of --points or --dmat");
    if (!dmat.empty()) {
      std::ifstream in(dmat);
      std::string word;
      if (!(in >> word) || word != "DMAT") throw std::invalid_argument(dmat + ": expected a DMAT header");
    }
    return std::make_shared<const PointSet>(load_point_set(points.empty() ? dmat : points));
  }
};

void add_space_options(CLI::App* cmd, SpaceArgs& s) {
  auto* a = cmd->add_option("--points", s.points, "Point coordinates, one point per line");
  auto* b = cmd->add_option("--dmat", s.dmat, "Distance matrix file with a DMAT header");
  a->excludes(b);
}

// "geometric:k" doubles up to tmax; "geometric:lo:hi:k" and lists are also accepted.
std::vector<double> variance_grid(const std::string& spec, double tmax) {
  if (spec.rfind("geometric:", 0) == 0 && spec.find(':', 10) == std::string::npos) {
    const double k = parse_double(spec.substr(10), "--grid");
    if (!(k >= 1.0) || k != static_cast<double>(static_cast<long>(k)))
      throw std::invalid_argument("--grid geometric:k needs a positive integer k");
    return geometric_grid(tmax / std::ldexp(1.0, static_cast<int>(k) - 1), tmax, static_cast<std::size_t>(k));
  }
  return parse_t_grid(spec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kantorovich-Rubinstein distances, point process simulation and rate experiments"};
  app.require_subcommand(1);

  SpaceArgs krd_space;
  std::string mu_path, nu_path, plan_path;
  double p = 1.0, C = 1.0;
  auto* krd_cmd = app.add_subcommand("krd", "Exact (p,C)-Kantorovich-Rubinstein distance between two measures");
  krd_cmd->add_option("--mu", mu_path, "First measure")->required();
  krd_cmd->add_option("--nu", nu_path, "Second measure")->required();
  krd_cmd->add_option("--p", p, "Order p >= 1")->required();
  krd_cmd->add_option("--C", C, "Cutoff C > 0")->required();
  krd_cmd->add_option("--plan", plan_path, "Write the unbalanced transport plan here");
  add_space_options(krd_cmd, krd_space);

  SpaceArgs tree_space;
  double eps = 0.0;
  auto* tree_cmd = app.add_subcommand("treebound", "Discretisation and ultrametric tree bounds");
  tree_cmd->add_option("--mu", mu_path, "First measure")->required();
  tree_cmd->add_option("--nu", nu_path, "Second measure")->required();
  tree_cmd->add_option("--eps", eps, "Leaf covering radius")->required();
  tree_cmd->add_option("--p", p, "Order p >= 1")->required();
  tree_cmd->add_option("--C", C, "Cutoff C > 0")->required();
  add_space_options(tree_cmd, tree_space);

  std::string spec_path, out_path;
  double T = 0.0;
  std::uint64_t seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a spatio-temporal point process");
  sim_cmd->add_option("--spec", spec_path, "Process specification")->required();
  sim_cmd->add_option("--T", T, "Time horizon")->required();
  sim_cmd->add_option("--seed", seed, "Random seed")->required();
  sim_cmd->add_option("--out", out_path, "Output pattern file")->required();

  double part_eps = 0.0, tmax = 0.0;
  std::string grid = "geometric:8";
  std::size_t replicates = 1000;
  auto* var_cmd = app.add_subcommand("variance", "Partitioned count variance against time");
  var_cmd->add_option("--spec", spec_path, "Process specification")->required();
  var_cmd->add_option("--partition-eps", part_eps, "Covering radius of the partition (0: whole space)")->required();
  var_cmd->add_option("--tmax", tmax, "Largest time")->required();
  var_cmd->add_option("--grid", grid, "geometric:k (doubling up to tmax), geometric:lo:hi:k or a list");
  var_cmd->add_option("--replicates", replicates, "Replicates (>= 30)");
  var_cmd->add_option("--seed", seed, "Random seed")->required();
  var_cmd->add_option("--out", out_path, "CSV output")->required();

  std::string config_path;
  auto* rates_cmd = app.add_subcommand("rates", "Convergence rate experiment for E KR(mu_hat_t, mu)");
  rates_cmd->add_option("--config", config_path, "Experiment configuration")->required();
  rates_cmd->add_option("--out", out_path, "CSV output")->required();

  auto* two_cmd = app.add_subcommand("twosample", "Two-sample experiment for |KR(mu_hat, nu_hat) - KR(mu, nu)|");
  two_cmd->add_option("--config", config_path, "Configuration with [process] and [process2]")->required();
  two_cmd->add_option("--out", out_path, "CSV output")->required();

  std::string lags = "0,0.5,1,1.5,2";
  double t_obs = 100.0;
  auto* rcov_cmd = app.add_subcommand("rcov", "Time-reduced covariance profile over the whole space");
  rcov_cmd->add_option("--spec", spec_path, "Process specification")->required();
  rcov_cmd->add_option("--lags", lags, "Comma separated increasing lags");
  rcov_cmd->add_option("--T", t_obs, "Observation window");
  rcov_cmd->add_option("--replicates", replicates, "Replicates");
  rcov_cmd->add_option("--seed", seed, "Random seed")->required();
  rcov_cmd->add_option("--out", out_path, "CSV output")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*krd_cmd) {
      auto space = krd_space.load();
      DiscreteMeasure mu = load_measure(mu_path, space), nu = load_measure(nu_path, space);
      KrdResult r = krd(mu, nu, KrdParams{p, C});
      std::cout << num(r.value) << '\n';
      if (!plan_path.empty()) {
        auto out = open_out(plan_path);
        write_plan(out, r.plan);
      }
    } else if (*tree_cmd) {
      auto space = tree_space.load();
      DiscreteMeasure mu = load_measure(mu_path, space), nu = load_measure(nu_path, space);
      SandwichReport s = discretization_sandwich(mu, nu, eps, KrdParams{p, C});
      std::cout << "exact " << num(s.exact) << '\n'
                << "projected_exact " << num(s.projected_exact) << '\n'
                << "tree_bound " << num(s.tree_bound) << '\n'
                << "discretization_bound " << num(s.discretization_bound) << '\n'
                << "discretization_holds " << (s.discretization_holds ? "true" : "false") << '\n'
                << "tree_holds " << (s.tree_holds ? "true" : "false") << '\n';
    } else if (*sim_cmd) {
      Pattern pat = simulate(load_process_spec(spec_path), T, seed);
      auto out = open_out(out_path);
      write_pattern(out, pat);
    } else if (*var_cmd) {
      ProcessSpec spec = load_process_spec(spec_path);
      Partition part = part_eps > 0.0 ? covering_partition(process_domain(spec), part_eps)
                                      : whole_space_partition(process_dim(spec));
      std::vector<double> tg = variance_grid(grid, tmax);
      VarianceProfile prof = partitioned_variance(spec, part, tg, replicates, seed);
      auto out = open_out(out_path);
      out << "t,var_sum,se,n_cells\n";
      char buf[160];
      for (std::size_t k = 0; k < prof.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%zu\n", prof.t[k], prof.var_sum[k], prof.se[k], prof.n_cells);
        out << buf;
      }
      try {
        GrowthFit f = fit_growth(prof);
        std::cout << "beta_hat " << num(f.beta_hat) << "\nkappa_hat " << num(f.kappa_hat) << "\nr2 " << num(f.r2)
                  << '\n';
      } catch (const std::invalid_argument& e) {
        std::cout << "growth fit unavailable: " << e.what() << '\n';
      }
    } else if (*rates_cmd || *two_cmd) {
      KvDocument doc = KvDocument::load(config_path);
      RateExperimentConfig a = parse_rate_config(doc);
      RateReport rep;
      if (*two_cmd) {
        RateExperimentConfig b = a;
        b.process = parse_process(doc, "2");
        doc.finish();
        rep = two_sample_experiment(a, b);
      } else {
        doc.finish();
        rep = run_rate_experiment(a);
      }
      auto out = open_out(out_path);
      out << format_rate_csv(rep);
      std::cout << "slope " << num(rep.slope) << " theory " << num(rep.theory_slope) << " verdict " << rep.verdict
                << '\n';
    } else if (*rcov_cmd) {
      ProcessSpec spec = load_process_spec(spec_path);
      std::vector<double> lg;
      for (const auto& s : split_list(lags, ',')) lg.push_back(parse_double(s, "--lags"));
      Box all = process_domain(spec);
      ReducedCovarianceProfile prof = reduced_covariance(spec, all, all, lg, t_obs, replicates, seed);
      auto out = open_out(out_path);
      out << "lag,value,increment,se\n";
      char buf[160];
      for (std::size_t k = 0; k < prof.lags.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", prof.lags[k], prof.value[k], prof.increment[k],
                      prof.se[k]);
        out << buf;
      }
      std::cout << "mu " << (prof.mu_known ? "analytic" : "estimated") << ' ' << num(prof.mu_A) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
