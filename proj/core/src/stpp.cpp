#include "krdist/stpp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace krdist {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::uint64_t poisson(Philox& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  boost::random::poisson_distribution<std::uint64_t, double> d(mean);
  return d(rng);
}

double exponential(Philox& rng, double rate) { return -std::log(rng.uniform()) / rate; }

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Box matern_domain() { return Box{{0.0}, {0.0}}; }

double neyman_scott_radius(const NeymanScottSpec& s) {
  boost::math::chi_squared_distribution<double> chi(static_cast<double>(s.window.dim()));
  return s.sigma * std::sqrt(boost::math::quantile(chi, 0.999));
}

struct Event {
  double t;
  std::vector<double> x;
};

Pattern to_pattern(std::size_t dim, double T, std::vector<Event>& ev) {
  std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  Pattern p;
  p.dim = dim;
  p.T = T;
  p.times.reserve(ev.size());
  p.coords.reserve(ev.size() * dim);
  for (const auto& e : ev) {
    p.times.push_back(e.t);
    p.coords.insert(p.coords.end(), e.x.begin(), e.x.end());
  }
  return p;
}

double temporal_kernel(const LgcpSpec& s, double h) {
  const double r2 = h * h / (s.temporal_length * s.temporal_length);
  if (s.kernel == TemporalKernel::ExponentiatedQuadratic) return std::exp(-0.5 * r2);
  return std::pow(1.0 + r2 / (2.0 * s.rq_a), -s.rq_a);
}

Eigen::MatrixXd jittered_cholesky(Eigen::MatrixXd K) {
  const double scale = K.diagonal().maxCoeff();
  double jitter = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = jitter == 0.0 ? 1e-12 * scale : jitter * 10.0;
  }
  throw std::runtime_error("covariance matrix is not positive definite");
}

}  // namespace

void validate(const ProcessSpec& spec) {
  std::visit(overloaded{
                 [](const PoissonSpec& s) { require(s.mass > 0.0, "poisson mass must be positive"); },
                 [](const BinomialSpec&) {},
                 [](const HawkesSpec& s) {
                   require(s.background_mass > 0.0, "hawkes background mass must be positive");
                   require(s.alpha >= 0.0 && s.beta > 0.0, "hawkes needs alpha >= 0 and beta > 0");
                   require(s.alpha < s.beta, "hawkes branching ratio alpha/beta must be below 1");
                   require(s.kernel_sigma > 0.0, "hawkes kernel sigma must be positive");
                   require(s.background.kind() != SpatialLaw::Kind::Discrete ||
                               s.kernel == HawkesKernel::Uniform,
                           "gaussian hawkes kernel needs a continuous domain");
                   require(s.background.domain().volume() > 0.0 || s.kernel == HawkesKernel::Uniform,
                           "gaussian hawkes kernel needs a domain of positive volume");
                 },
                 [](const NeymanScottSpec& s) {
                   s.window.validate();
                   require(s.window.volume() > 0.0, "neyman-scott window must have positive volume");
                   require(s.parent_rate > 0.0 && s.mean_offspring > 0.0 && s.sigma > 0.0 && s.delay_rate > 0.0,
                           "neyman-scott parameters must be positive");
                 },
                 [](const MaternISpec& s) { require(s.rate > 0.0 && s.R > 0.0, "matern rate and R must be positive"); },
                 [](const LgcpSpec& s) {
                   require(s.dim >= 1 && s.grid >= 2, "lgcp needs dim >= 1 and grid >= 2");
                   require(s.dt > 0.0 && s.variance > 0.0 && s.spatial_length > 0.0 && s.temporal_length > 0.0,
                           "lgcp scales must be positive");
                   require(s.kernel != TemporalKernel::RationalQuadratic || s.rq_a > 0.0,
                           "rational quadratic exponent must be positive");
                   require(std::isfinite(s.mean_log), "lgcp mean must be finite");
                 },
                 [](const RenewalParetoSpec& s) {
                   require(s.gamma > 1.0 && s.gamma < 2.0, "pareto renewal needs 1 < gamma < 2");
                   require(s.mass > 0.0, "renewal mass must be positive");
                 },
             },
             spec);
}

std::size_t process_dim(const ProcessSpec& spec) { return process_domain(spec).dim(); }

Box process_domain(const ProcessSpec& spec) {
  return std::visit(overloaded{
                        [](const PoissonSpec& s) { return s.law.domain(); },
                        [](const BinomialSpec& s) { return s.law.domain(); },
                        [](const HawkesSpec& s) { return s.background.domain(); },
                        [](const NeymanScottSpec& s) { return s.window; },
                        [](const MaternISpec&) { return matern_domain(); },
                        [](const LgcpSpec& s) { return Box::unit(s.dim); },
                        [](const RenewalParetoSpec& s) { return s.law.domain(); },
                    },
                    spec);
}

bool is_discrete_time(const ProcessSpec& spec) { return std::holds_alternative<BinomialSpec>(spec); }

const char* process_name(const ProcessSpec& spec) {
  static const char* names[] = {"poisson", "binomial", "hawkes", "neyman_scott",
                                "matern1", "lgcp",     "renewal_pareto"};
  return names[spec.index()];
}

double intensity_mass(const ProcessSpec& spec) {
  return std::visit(overloaded{
                        [](const PoissonSpec& s) { return s.mass; },
                        [](const BinomialSpec&) { return 1.0; },
                        [](const HawkesSpec& s) { return s.background_mass / (1.0 - s.alpha / s.beta); },
                        [](const NeymanScottSpec& s) {
                          return s.parent_rate * s.mean_offspring * s.window.volume();
                        },
                        [](const MaternISpec& s) { return s.rate * std::exp(-2.0 * s.rate * s.R); },
                        [](const LgcpSpec& s) { return std::exp(s.mean_log + 0.5 * s.variance); },
                        [](const RenewalParetoSpec& s) { return s.mass; },
                    },
                    spec);
}

std::optional<double> known_intensity(const ProcessSpec& spec, const Box& region) {
  const double m = intensity_mass(spec);
  return std::visit(
      overloaded{
          [&](const PoissonSpec& s) -> std::optional<double> { return m * s.law.probability(region); },
          [&](const BinomialSpec& s) -> std::optional<double> { return s.law.probability(region); },
          [&](const HawkesSpec& s) -> std::optional<double> {
            const double nu = s.alpha / s.beta;
            const Box& dom = s.background.domain();
            if (s.background.kind() == SpatialLaw::Kind::Uniform)
              return m * s.background.probability(region);
            if (s.kernel == HawkesKernel::Uniform && dom.volume() > 0.0) {
              SpatialLaw u = SpatialLaw::uniform(dom);
              return s.background_mass * s.background.probability(region) +
                     s.background_mass * nu / (1.0 - nu) * u.probability(region);
            }
            return std::nullopt;
          },
          [&](const NeymanScottSpec& s) -> std::optional<double> {
            return m * SpatialLaw::uniform(s.window).probability(region);
          },
          [&](const MaternISpec&) -> std::optional<double> {
            return region.contains(std::vector<double>{0.0}) ? m : 0.0;
          },
          [&](const LgcpSpec& s) -> std::optional<double> {
            return m * SpatialLaw::uniform(Box::unit(s.dim)).probability(region);
          },
          [&](const RenewalParetoSpec& s) -> std::optional<double> { return m * s.law.probability(region); },
      },
      spec);
}

std::optional<SpatialLaw> intensity_law(const ProcessSpec& spec) {
  return std::visit(
      overloaded{
          [](const PoissonSpec& s) -> std::optional<SpatialLaw> { return s.law; },
          [](const BinomialSpec& s) -> std::optional<SpatialLaw> { return s.law; },
          [](const HawkesSpec& s) -> std::optional<SpatialLaw> {
            if (s.background.kind() == SpatialLaw::Kind::Uniform || s.alpha == 0.0) return s.background;
            return std::nullopt;
          },
          [](const NeymanScottSpec& s) -> std::optional<SpatialLaw> { return SpatialLaw::uniform(s.window); },
          [](const MaternISpec&) -> std::optional<SpatialLaw> {
            return SpatialLaw::discrete(PointSet::from_coordinates(1, {0.0}), {1.0});
          },
          [](const LgcpSpec& s) -> std::optional<SpatialLaw> { return SpatialLaw::uniform(Box::unit(s.dim)); },
          [](const RenewalParetoSpec& s) -> std::optional<SpatialLaw> { return s.law; },
      },
      spec);
}

double hawkes_burn_in(const HawkesSpec& s, double T) {
  const double gap = s.beta - s.alpha;
  const double arg = 1e3 * s.alpha / gap * s.background_mass * T;
  const double B = arg > 1.0 ? std::log(arg) / gap : 0.0;
  return std::max(B, 10.0 / gap);
}

struct Simulator::LgcpFactor {
  std::size_t cells = 0;    // spatial cells
  std::size_t steps = 0;    // time steps
  Eigen::MatrixXd Ls;       // cells x cells
  Eigen::MatrixXd Lt;       // steps x steps
  std::vector<double> step_len;
};

Simulator::Simulator(ProcessSpec spec, double T) : spec_(std::move(spec)), T_(T) {
  validate(spec_);
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive");
  if (const auto* s = std::get_if<LgcpSpec>(&spec_)) {
    lgcp_ = std::make_unique<LgcpFactor>();
    std::size_t cells = 1;
    for (std::size_t k = 0; k < s->dim; ++k) cells *= s->grid;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / s->dt - 1e-9));
    lgcp_->cells = cells;
    lgcp_->steps = steps;
    for (std::size_t k = 0; k < steps; ++k)
      lgcp_->step_len.push_back(std::min(T, (k + 1) * s->dt) - k * s->dt);

    const double h = 1.0 / static_cast<double>(s->grid);
    std::vector<double> centre(cells * s->dim);
    for (std::size_t c = 0; c < cells; ++c) {
      std::size_t r = c;
      for (std::size_t k = s->dim; k-- > 0;) {
        centre[c * s->dim + k] = (static_cast<double>(r % s->grid) + 0.5) * h;
        r /= s->grid;
      }
    }
    Eigen::MatrixXd Ks(cells, cells);
    for (std::size_t a = 0; a < cells; ++a)
      for (std::size_t b = 0; b < cells; ++b) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < s->dim; ++k) {
          double z = centre[a * s->dim + k] - centre[b * s->dim + k];
          d2 += z * z;
        }
        Ks(a, b) = s->variance * std::exp(-0.5 * d2 / (s->spatial_length * s->spatial_length));
      }
    Eigen::MatrixXd Kt(steps, steps);
    for (std::size_t a = 0; a < steps; ++a)
      for (std::size_t b = 0; b < steps; ++b)
        Kt(a, b) = temporal_kernel(*s, (static_cast<double>(a) - static_cast<double>(b)) * s->dt);
    lgcp_->Ls = jittered_cholesky(std::move(Ks));
    lgcp_->Lt = jittered_cholesky(std::move(Kt));
  }
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

Pattern Simulator::simulate(Philox& rng) const {
  const double T = T_;
  std::vector<Event> ev;
  const std::size_t dim = process_dim(spec_);

  auto draw = [&](const SpatialLaw& law) {
    std::vector<double> x(law.dim());
    law.sample(rng, x.data());
    return x;
  };

  std::visit(
      overloaded{
          [&](const PoissonSpec& s) {
            double t = exponential(rng, s.mass);
            while (t <= T) {
              ev.push_back({t, draw(s.law)});
              t += exponential(rng, s.mass);
            }
          },
          [&](const BinomialSpec& s) {
            const auto n = static_cast<std::size_t>(std::floor(T + 1e-12));
            for (std::size_t k = 1; k <= n; ++k) ev.push_back({static_cast<double>(k), draw(s.law)});
          },
          [&](const HawkesSpec& s) {
            const double B = hawkes_burn_in(s, T);
            const double nu = s.alpha / s.beta;
            const Box& dom = s.background.domain();
            std::vector<Event> queue;
            const std::uint64_t n0 = poisson(rng, s.background_mass * (T + B));
            for (std::uint64_t k = 0; k < n0; ++k) {
              double t = -B + (T + B) * rng.uniform();
              queue.push_back({t, draw(s.background)});
            }
            boost::random::normal_distribution<double> z;
            SpatialLaw uni;
            if (s.kernel == HawkesKernel::Uniform && dom.volume() > 0.0) uni = SpatialLaw::uniform(dom);
            while (!queue.empty()) {
              Event e = std::move(queue.back());
              queue.pop_back();
              const std::uint64_t kids = poisson(rng, nu);
              for (std::uint64_t c = 0; c < kids; ++c) {
                double t = e.t + exponential(rng, s.beta);
                if (t > T) continue;
                std::vector<double> x;
                if (s.kernel == HawkesKernel::Uniform) {
                  x = dom.volume() > 0.0 ? draw(uni) : draw(s.background);
                } else {
                  x = e.x;
                  for (std::size_t k = 0; k < x.size(); ++k) {
                    const double w = dom.hi[k] - dom.lo[k];
                    double y = std::fmod(x[k] + s.kernel_sigma * z(rng) - dom.lo[k], w);
                    if (y < 0.0) y += w;
                    x[k] = dom.lo[k] + y;
                  }
                }
                queue.push_back({t, std::move(x)});
              }
              if (e.t > 0.0) ev.push_back(std::move(e));
            }
          },
          [&](const NeymanScottSpec& s) {
            const double r = neyman_scott_radius(s);
            const double B = std::log(1000.0) / s.delay_rate;
            Box big = s.window;
            for (std::size_t k = 0; k < big.dim(); ++k) {
              big.lo[k] -= r;
              big.hi[k] += r;
            }
            SpatialLaw parents = SpatialLaw::uniform(big);
            boost::random::normal_distribution<double> z;
            const std::uint64_t np = poisson(rng, s.parent_rate * big.volume() * (T + B));
            for (std::uint64_t k = 0; k < np; ++k) {
              const double tp = -B + (T + B) * rng.uniform();
              std::vector<double> xp = draw(parents);
              const std::uint64_t kids = poisson(rng, s.mean_offspring);
              for (std::uint64_t c = 0; c < kids; ++c) {
                const double t = tp + exponential(rng, s.delay_rate);
                std::vector<double> x = xp;
                for (double& v : x) v += s.sigma * z(rng);
                if (t > 0.0 && t <= T && s.window.contains(x)) ev.push_back({t, std::move(x)});
              }
            }
          },
          [&](const MaternISpec& s) {
            std::vector<double> ts;
            double t = -s.R + exponential(rng, s.rate);
            while (t <= T + s.R) {
              ts.push_back(t);
              t += exponential(rng, s.rate);
            }
            for (std::size_t i = 0; i < ts.size(); ++i) {
              if (ts[i] <= 0.0 || ts[i] > T) continue;
              const bool near_prev = i > 0 && ts[i] - ts[i - 1] <= s.R;
              const bool near_next = i + 1 < ts.size() && ts[i + 1] - ts[i] <= s.R;
              if (!near_prev && !near_next) ev.push_back({ts[i], {0.0}});
            }
          },
          [&](const LgcpSpec& s) {
            const LgcpFactor& f = *lgcp_;
            boost::random::normal_distribution<double> z;
            Eigen::MatrixXd W(f.cells, f.steps);
            for (Eigen::Index j = 0; j < W.cols(); ++j)
              for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = z(rng);
            Eigen::MatrixXd Z = f.Ls * W * f.Lt.transpose();
            const double h = 1.0 / static_cast<double>(s.grid);
            const double cell_vol = std::pow(h, static_cast<double>(s.dim));
            std::vector<std::size_t> digit(s.dim);
            for (std::size_t c = 0; c < f.cells; ++c) {
              std::size_t r = c;
              for (std::size_t k = s.dim; k-- > 0;) {
                digit[k] = r % s.grid;
                r /= s.grid;
              }
              for (std::size_t k = 0; k < f.steps; ++k) {
                const double t0 = static_cast<double>(k) * s.dt;
                const double lam = std::exp(s.mean_log + Z(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)));
                const std::uint64_t n = poisson(rng, lam * cell_vol * f.step_len[k]);
                for (std::uint64_t e = 0; e < n; ++e) {
                  std::vector<double> x(s.dim);
                  for (std::size_t q = 0; q < s.dim; ++q)
                    x[q] = (static_cast<double>(digit[q]) + rng.uniform()) * h;
                  const double t = t0 + f.step_len[k] * rng.uniform();
                  ev.push_back({t, std::move(x)});
                }
              }
            }
          },
          [&](const RenewalParetoSpec& s) {
            const double g = s.gamma;
            const double xm = (g - 1.0) / (g * s.mass);
            // Stationary delay: G(t) = m t on [0, x_m], 1 - G(t) = (t/x_m)^(1-g)/g beyond.
            const double u = rng.uniform();
            double t = u <= s.mass * xm ? u / s.mass : xm * std::pow(g * (1.0 - u), -1.0 / (g - 1.0));
            while (t <= T) {
              ev.push_back({t, draw(s.law)});
              t += xm * std::pow(rng.uniform(), -1.0 / g);
            }
          },
      },
      spec_);
  return to_pattern(dim, T, ev);
}

Pattern simulate(const ProcessSpec& spec, double T, std::uint64_t seed) {
  Simulator sim(spec, T);
  Philox rng(seed, 0);
  return sim.simulate(rng);
}

std::vector<double> simulate_hawkes_cluster(const HawkesSpec& spec, double horizon, Philox& rng) {
  validate(ProcessSpec{spec});
  const double nu = spec.alpha / spec.beta;
  std::vector<double> out, queue{0.0};
  while (!queue.empty()) {
    const double t0 = queue.back();
    queue.pop_back();
    const std::uint64_t kids = poisson(rng, nu);
    for (std::uint64_t c = 0; c < kids; ++c) {
      const double t = t0 + exponential(rng, spec.beta);
      if (t > horizon) continue;
      out.push_back(t);
      queue.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DiscreteMeasure empirical_measure(const Pattern& pattern, double t) {
  if (!(t > 0.0) || t > pattern.T * (1.0 + 1e-12)) throw std::invalid_argument("t out of range");
  const std::size_t n = static_cast<std::size_t>(
      std::upper_bound(pattern.times.begin(), pattern.times.end(), t) - pattern.times.begin());
  if (n == 0) {
    auto space = std::make_shared<const PointSet>(
        PointSet::from_coordinates(pattern.dim, std::vector<double>(pattern.dim, 0.0)));
    return DiscreteMeasure(space, {});
  }
  std::vector<double> coords(pattern.coords.begin(), pattern.coords.begin() + n * pattern.dim);
  Dedup dd = dedup_points(PointSet::from_coordinates(pattern.dim, std::move(coords)));
  std::vector<double> w(dd.unique.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) w[dd.map[i]] += 1.0 / t;
  auto space = std::make_shared<const PointSet>(std::move(dd.unique));
  return DiscreteMeasure::from_dense(space, w);
}

std::size_t count_in(const Pattern& pattern, const Box& region, double t0, double t1) {
  if (region.dim() != pattern.dim) throw std::invalid_argument("region has wrong dimension");
  if (!(t0 <= t1)) throw std::invalid_argument("invalid interval");
  std::size_t c = 0;
  auto lo = std::upper_bound(pattern.times.begin(), pattern.times.end(), t0);
  auto hi = std::upper_bound(pattern.times.begin(), pattern.times.end(), t1);
  for (auto it = lo; it < hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - pattern.times.begin());
    if (region.contains(pattern.location(i))) ++c;
  }
  return c;
}

}  // namespace krdist
