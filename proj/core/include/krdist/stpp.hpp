#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "krdist/discrete_measure.hpp"
#include "krdist/rng.hpp"
#include "krdist/spatial_law.hpp"

namespace krdist {

// Poisson process with intensity mass * law (x) Lebesgue.
struct PoissonSpec {
  SpatialLaw law;
  double mass = 1.0;
};

// One event at each integer time, location drawn from `law`.
struct BinomialSpec {
  SpatialLaw law;
};

enum class HawkesKernel { Uniform, Gaussian };

// Self-exciting process with excitation alpha * exp(-beta h) * K(x, .). The
// spatial kernel K is either uniform on the domain or a Gaussian wrapped on
// the domain box, so it integrates to one over the space.
struct HawkesSpec {
  SpatialLaw background;
  double background_mass = 1.0;
  double alpha = 0.5;
  double beta = 1.0;
  HawkesKernel kernel = HawkesKernel::Uniform;
  double kernel_sigma = 0.05;
};

// Parents form a Poisson process with `parent_rate` per unit volume and
// time; each has Poisson(mean_offspring) children displaced by N(0, sigma^2 I)
// and delayed by Exp(delay_rate). Only children inside `window` are kept.
struct NeymanScottSpec {
  Box window;
  double parent_rate = 1.0;
  double mean_offspring = 1.0;
  double sigma = 0.05;
  double delay_rate = 1.0;
};

// Temporal Matern type I hard-core process on a single location: Poisson
// events at `rate`, removing every event with another event within R.
struct MaternISpec {
  double rate = 1.0;
  double R = 0.1;
};

enum class TemporalKernel { ExponentiatedQuadratic, RationalQuadratic };

// Log-Gaussian Cox process on [0,1]^dim x (0,T] with log intensity
// piecewise constant on a grid of `grid`^dim spatial cells and time steps of
// length dt. The covariance is variance * k_s(x - x') * k_t(t - t').
struct LgcpSpec {
  std::size_t dim = 1;
  std::size_t grid = 2;
  double dt = 1.0;
  double mean_log = -0.5;
  double variance = 1.0;
  double spatial_length = 1.0;
  TemporalKernel kernel = TemporalKernel::RationalQuadratic;
  double temporal_length = 1.0;
  double rq_a = 0.25;
};

// Stationary renewal process with Pareto(gamma, x_m) inter-arrival times,
// x_m = (gamma - 1) / (gamma * mass), and i.i.d. locations from `law`.
struct RenewalParetoSpec {
  SpatialLaw law;
  double gamma = 1.5;
  double mass = 1.0;
};

using ProcessSpec = std::variant<PoissonSpec, BinomialSpec, HawkesSpec, NeymanScottSpec, MaternISpec,
                                 LgcpSpec, RenewalParetoSpec>;

// Events sorted by time; coordinates are stored row-major.
struct Pattern {
  std::size_t dim = 1;
  double T = 0.0;
  std::vector<double> coords;
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  std::span<const double> location(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

void validate(const ProcessSpec& spec);
std::size_t process_dim(const ProcessSpec& spec);
Box process_domain(const ProcessSpec& spec);
bool is_discrete_time(const ProcessSpec& spec);
const char* process_name(const ProcessSpec& spec);

// Mass m of the first moment measure mu per unit time.
double intensity_mass(const ProcessSpec& spec);

// mu(A) per unit time when it has a closed form.
std::optional<double> known_intensity(const ProcessSpec& spec, const Box& region);

// mu / m as a spatial law, when it has a closed form.
std::optional<SpatialLaw> intensity_law(const ProcessSpec& spec);

// Holds any per-spec precomputation (the LGCP covariance factors) so that
// many replicates on the same horizon share it.
class Simulator {
 public:
  Simulator(ProcessSpec spec, double T);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  Pattern simulate(Philox& rng) const;
  const ProcessSpec& spec() const { return spec_; }
  double horizon() const { return T_; }

 private:
  struct LgcpFactor;
  ProcessSpec spec_;
  double T_;
  std::unique_ptr<LgcpFactor> lgcp_;
};

Pattern simulate(const ProcessSpec& spec, double T, std::uint64_t seed);

// Offspring event times (all generations) of one Hawkes ancestor at time 0.
std::vector<double> simulate_hawkes_cluster(const HawkesSpec& spec, double horizon, Philox& rng);

// Empirical measure (1/t) sum over events with time <= t, on the deduplicated
// event locations.
DiscreteMeasure empirical_measure(const Pattern& pattern, double t);

// Number of events in region x (t0, t1].
std::size_t count_in(const Pattern& pattern, const Box& region, double t0, double t1);

// Burn-in length used by the Hawkes simulator.
double hawkes_burn_in(const HawkesSpec& spec, double T);

}  // namespace krdist
