#include <benchmark/benchmark.h>

#include <random>

#include "krdist/krd.hpp"
#include "krdist/ot_solver.hpp"
#include "krdist/stpp.hpp"
#include "krdist/tree_krd.hpp"

using namespace krdist;

namespace {

std::shared_ptr<const PointSet> random_space(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * dim);
  for (double& x : c) x = u(rng);
  return std::make_shared<const PointSet>(PointSet::from_coordinates(dim, std::move(c)));
}

DiscreteMeasure random_measure(const std::shared_ptr<const PointSet>& sp, std::size_t first, std::size_t count,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<Atom> atoms;
  for (std::size_t i = first; i < first + count; ++i) atoms.push_back({i, u(rng) / static_cast<double>(count)});
  return DiscreteMeasure(sp, std::move(atoms));
}

void BM_SolveBalanced(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(n, 1.0 / static_cast<double>(n)), b(n, 1.0 / static_cast<double>(n));
  CostMatrix c(n, n);
  for (double& x : c.data) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_balanced(a, b, c).objective);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveBalanced)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_Krd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sp = random_space(2 * n, 2, 11);
  DiscreteMeasure mu = random_measure(sp, 0, n, 1), nu = random_measure(sp, n, n, 2);
  const KrdParams prm{1.0, static_cast<double>(state.range(1)) / 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(krd_value(mu, nu, prm));
}
BENCHMARK(BM_Krd)->ArgsProduct({{32, 128, 512}, {1, 5, 20}});

void BM_TreeBound(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sp = random_space(2 * n, 2, 13);
  DiscreteMeasure mu = random_measure(sp, 0, n, 3), nu = random_measure(sp, n, n, 4);
  const KrdParams prm{1.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(discretization_sandwich(mu, nu, 0.05, prm).tree_bound);
}
BENCHMARK(BM_TreeBound)->Arg(64)->Arg(256);

void BM_SimulateHawkes(benchmark::State& state) {
  HawkesSpec spec{SpatialLaw::uniform(Box::unit(2)), 1.0, 0.5, 1.0, HawkesKernel::Gaussian, 0.05};
  Simulator sim(spec, static_cast<double>(state.range(0)));
  std::uint64_t r = 0;
  for (auto _ : state) {
    Philox rng(99, r++);
    benchmark::DoNotOptimize(sim.simulate(rng).size());
  }
}
BENCHMARK(BM_SimulateHawkes)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
