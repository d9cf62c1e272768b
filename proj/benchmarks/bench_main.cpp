#include <benchmark/benchmark.h>

#include <vector>

#include "permuton_lab/core.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/interchange.hpp"
#include "permuton_lab/rng.hpp"
#include "permuton_lab/transport.hpp"

namespace pl = permuton_lab;

namespace {

pl::Permuton2D random_cloud(std::size_t n, pl::ReplicaStream& rng) {
  std::vector<pl::Permuton2D::Point> pts(n);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  return pl::Permuton2D::from_points(pts);
}

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  pl::ReplicaStream rng(1, 0);
  const auto a = random_cloud(n, rng);
  const auto b = random_cloud(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pl::wasserstein_points(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_TransportSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  pl::ReplicaStream rng(2, 0);
  std::vector<pl::WeightedPoint> supply(n), demand(n + 3);
  for (auto& p : supply) p = {rng.uniform(), rng.uniform(), 1.0 / static_cast<double>(n)};
  for (auto& p : demand) p = {rng.uniform(), rng.uniform(), 1.0 / static_cast<double>(n + 3)};
  for (auto _ : state) benchmark::DoNotOptimize(pl::transport_exact(supply, demand));
}
BENCHMARK(BM_TransportSimplex)->Arg(32)->Arg(64)->Arg(128);

void BM_UnbiasedEvents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t swaps = 0, replica = 0;
  for (auto _ : state) {
    pl::SimulationOptions o;
    o.replica = replica++;
    o.record = false;
    swaps += pl::simulate_unbiased(n, 1.5, 0.2, 1, nullptr, o).swap_count;
  }
  state.counters["swaps/s"] = benchmark::Counter(static_cast<double>(swaps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_UnbiasedEvents)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_BiasedEvents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rates = pl::discrete_rates(*pl::sine_field(), n, 1.5, 0.05, 1.0);
  std::uint64_t swaps = 0, replica = 0;
  for (auto _ : state) {
    pl::SimulationOptions o;
    o.replica = replica++;
    o.record = false;
    swaps += pl::simulate_biased(rates, 0.2, 1, nullptr, o).swap_count;
  }
  state.counters["swaps/s"] = benchmark::Counter(static_cast<double>(swaps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_BiasedEvents)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
