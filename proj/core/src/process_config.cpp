#include "krdist/process_config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "krdist/diagnostics.hpp"

namespace krdist {

namespace {

std::vector<double> broadcast(const KvSection& s, const std::string& key, std::size_t dim, double fallback) {
  if (!s.has(key)) return std::vector<double>(dim, fallback);
  std::vector<double> v = s.list(key);
  if (v.size() == 1) return std::vector<double>(dim, v[0]);
  if (v.size() != dim) throw std::invalid_argument("[" + s.name() + "] " + key + " has the wrong dimension");
  return v;
}

SpatialLaw parse_law(const KvDocument& doc, const std::string& name, std::size_t default_dim) {
  if (!doc.has(name)) return SpatialLaw::uniform(Box::unit(default_dim));
  const KvSection& s = doc.section(name);
  const std::string kind = s.str_or("kind", "uniform");
  if (kind == "discrete") {
    std::vector<double> coords;
    std::size_t dim = 0;
    for (const auto& pt : split_list(s.str("points"), ';')) {
      std::vector<double> x;
      for (const auto& c : split_list(pt, ',')) x.push_back(parse_double(c, "[" + name + "] points"));
      if (dim == 0) dim = x.size();
      if (x.size() != dim || dim == 0) throw std::invalid_argument("[" + name + "] points have mixed dimensions");
      coords.insert(coords.end(), x.begin(), x.end());
    }
    const std::size_t n = coords.size() / std::max<std::size_t>(dim, 1);
    std::vector<double> w = s.has("weights") ? s.list("weights") : std::vector<double>(n, 1.0);
    if (w.size() != n) throw std::invalid_argument("[" + name + "] needs one weight per point");
    return SpatialLaw::discrete(PointSet::from_coordinates(dim, std::move(coords)), std::move(w));
  }
  const std::size_t dim = static_cast<std::size_t>(s.uint_or("dim", default_dim));
  if (dim == 0) throw std::invalid_argument("[" + name + "] dim must be positive");
  Box box{broadcast(s, "lo", dim, 0.0), broadcast(s, "hi", dim, 1.0)};
  if (kind == "uniform") return SpatialLaw::uniform(std::move(box));
  if (kind == "gaussian_mixture") {
    // components = weight mean_1 ... mean_d sd; ...
    std::vector<GaussianComponent> comps;
    for (const auto& c : split_list(s.str("components"), ';')) {
      std::istringstream ss(c);
      std::vector<double> f;
      std::string tok;
      while (ss >> tok) f.push_back(parse_double(tok, "[" + name + "] components"));
      if (f.size() != dim + 2) throw std::invalid_argument("[" + name + "] component needs weight, mean and sd");
      comps.push_back({f[0], std::vector<double>(f.begin() + 1, f.end() - 1), f.back()});
    }
    return SpatialLaw::gaussian_mixture(std::move(box), std::move(comps));
  }
  throw std::invalid_argument("[" + name + "] unknown law kind '" + kind + "'");
}

}  // namespace

ProcessSpec parse_process(const KvDocument& doc, const std::string& suffix) {
  const KvSection& s = doc.section("process" + suffix);
  const std::string law_name = "law" + suffix;
  const std::string kind = s.str("kind");
  const std::size_t dim = static_cast<std::size_t>(s.uint_or("dim", 1));
  ProcessSpec spec;
  if (kind == "poisson") {
    spec = PoissonSpec{parse_law(doc, law_name, dim), s.num_or("mass", 1.0)};
  } else if (kind == "binomial") {
    spec = BinomialSpec{parse_law(doc, law_name, dim)};
  } else if (kind == "hawkes") {
    HawkesSpec h;
    h.background = parse_law(doc, law_name, dim);
    h.background_mass = s.num_or("background_mass", 1.0);
    h.alpha = s.num("alpha");
    h.beta = s.num("beta");
    const std::string k = s.str_or("kernel", "uniform");
    if (k == "uniform")
      h.kernel = HawkesKernel::Uniform;
    else if (k == "gaussian")
      h.kernel = HawkesKernel::Gaussian;
    else
      throw std::invalid_argument("[process] unknown hawkes kernel '" + k + "'");
    h.kernel_sigma = s.num_or("kernel_sigma", 0.05);
    spec = h;
  } else if (kind == "neyman_scott") {
    NeymanScottSpec n;
    n.window = Box{broadcast(s, "window_lo", dim, 0.0), broadcast(s, "window_hi", dim, 1.0)};
    n.parent_rate = s.num("parent_rate");
    n.mean_offspring = s.num("mean_offspring");
    n.sigma = s.num("sigma");
    n.delay_rate = s.num_or("delay_rate", 1.0);
    spec = n;
  } else if (kind == "matern1") {
    spec = MaternISpec{s.num("rate"), s.num("R")};
  } else if (kind == "lgcp") {
    LgcpSpec l;
    l.dim = dim;
    l.grid = static_cast<std::size_t>(s.uint_or("grid", 2));
    l.dt = s.num_or("dt", 1.0);
    l.mean_log = s.num_or("mean_log", -0.5);
    l.variance = s.num_or("variance", 1.0);
    l.spatial_length = s.num_or("spatial_length", 1.0);
    const std::string k = s.str_or("temporal_kernel", "rq");
    if (k == "rq")
      l.kernel = TemporalKernel::RationalQuadratic;
    else if (k == "eq")
      l.kernel = TemporalKernel::ExponentiatedQuadratic;
    else
      throw std::invalid_argument("[process] unknown temporal kernel '" + k + "'");
    l.temporal_length = s.num_or("temporal_length", 1.0);
    l.rq_a = s.num_or("rq_a", 0.25);
    spec = l;
  } else if (kind == "renewal_pareto") {
    spec = RenewalParetoSpec{parse_law(doc, law_name, dim), s.num_or("gamma", 1.5), s.num_or("mass", 1.0)};
  } else {
    throw std::invalid_argument("[process] unknown kind '" + kind + "'");
  }
  if (doc.has(law_name) && (kind == "neyman_scott" || kind == "matern1" || kind == "lgcp"))
    throw std::invalid_argument("[" + law_name + "] is not used by process kind '" + kind + "'");
  validate(spec);
  return spec;
}

ProcessSpec load_process_spec(const std::string& path) {
  KvDocument doc = KvDocument::load(path);
  ProcessSpec spec = parse_process(doc);
  doc.finish();
  return spec;
}

std::vector<double> parse_t_grid(const std::string& text) {
  if (text.rfind("geometric:", 0) == 0) {
    auto parts = split_list(text.substr(10), ':');
    if (parts.size() != 3) throw std::invalid_argument("t_grid must be 'geometric:lo:hi:k'");
    const double lo = parse_double(parts[0], "t_grid lo"), hi = parse_double(parts[1], "t_grid hi");
    const double k = parse_double(parts[2], "t_grid k");
    if (!(k >= 1.0) || k != std::floor(k)) throw std::invalid_argument("t_grid k must be a positive integer");
    return geometric_grid(lo, hi, static_cast<std::size_t>(k));
  }
  std::vector<double> g;
  for (const auto& piece : split_list(text, ',')) g.push_back(parse_double(piece, "t_grid"));
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(g[k] > 0.0) || (k > 0 && !(g[k] > g[k - 1]))) throw std::invalid_argument("t_grid must be positive and increasing");
  return g;
}

RateExperimentConfig parse_rate_config(const KvDocument& doc, const std::string& suffix) {
  const KvSection& e = doc.section("experiment");
  RateExperimentConfig c;
  c.process = parse_process(doc, suffix);
  c.params.p = e.num_or("p", 1.0);
  c.params.C = e.num_or("C", 1.0);
  c.t_grid = parse_t_grid(e.str("t_grid"));
  c.replicates = static_cast<std::size_t>(e.uint_or("replicates", 100));
  c.seed = e.uint_or("seed", 1);
  c.proxy_per_axis = static_cast<std::size_t>(e.uint_or("proxy_per_axis", 0));
  c.alpha_override = e.num_opt("alpha");
  c.beta_override = e.num_opt("beta");
  c.bootstrap = static_cast<std::size_t>(e.uint_or("bootstrap", 200));
  c.slope_tolerance = e.num_or("slope_tolerance", 0.12);
  c.slope_min = e.num_opt("slope_min");
  c.slope_max = e.num_opt("slope_max");
  c.max_instance = static_cast<std::size_t>(e.uint_or("max_instance", c.max_instance));
  c.threads = static_cast<std::size_t>(e.uint_or("threads", 1));
  c.validate();
  return c;
}

}  // namespace krdist
