#include <benchmark/benchmark.h>

#include "caravan/bridge.hpp"
#include "caravan/discrete.hpp"
#include "caravan/limit.hpp"
#include "caravan/parking.hpp"
#include "caravan/samplers.hpp"

namespace {

using namespace caravan;

// Full parking run; eps sets the number of caravans (1/eps for unit lengths).
void BM_Parking(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const CaravanInstance inst = make_instance(CaravanLaw::exponential(1.0), eps, 1);
  for (auto _ : state) {
    ParkingLot lot;
    for (std::size_t i = 0; i < inst.size(); ++i) benchmark::DoNotOptimize(lot.park(inst.arrivals[i], inst.masses[i]));
  }
  state.SetComplexityN(static_cast<std::int64_t>(inst.size()));
}
BENCHMARK(BM_Parking)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity();

void BM_RankedAt(benchmark::State& state) {
  const CaravanInstance inst = make_instance(CaravanLaw::pareto(1.5, 1.0), 1.0 / static_cast<double>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ranked_at(inst, inst.size() / 2));
}
BENCHMARK(BM_RankedAt)->RangeMultiplier(4)->Range(1 << 8, 1 << 16);

// Constancy sweep over a jump path with n jumps.
void BM_ConstancySweep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> atoms(n, 1.0 / static_cast<double>(n));
  std::vector<double> locs(n);
  Rng rng(3);
  for (double& x : locs) x = open_uniform(rng);
  const JumpDriftPath path = compensated_jump_path(atoms, locs);
  for (auto _ : state) benchmark::DoNotOptimize(constancy_intervals(path, 0.0));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ConstancySweep)->RangeMultiplier(4)->Range(1 << 8, 1 << 18)->Complexity();

void BM_GridFragmentation(benchmark::State& state) {
  const GridPath b = brownian_bridge(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(fragmentation(b, 1.0));
}
BENCHMARK(BM_GridFragmentation)->RangeMultiplier(4)->Range(1 << 12, 1 << 20);

void BM_UnionFind(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto caravans = sample_discrete_caravans(n, CaravanLaw::geometric(0.3), 5);
  for (auto _ : state) benchmark::DoNotOptimize(knuth_park(n, caravans));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_UnionFind)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Complexity();

void BM_NaiveScan(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto caravans = sample_discrete_caravans(n, CaravanLaw::geometric(0.3), 5);
  for (auto _ : state) benchmark::DoNotOptimize(knuth_park_naive(n, caravans));
}
BENCHMARK(BM_NaiveScan)->RangeMultiplier(4)->Range(1 << 8, 1 << 12);

}  // namespace

BENCHMARK_MAIN();
