#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "flagtrail/analytics.hpp"

using namespace flagtrail;

namespace {

std::vector<double> sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 40);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_AverageRanks(benchmark::State& state) {
  const auto xs = sample(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(average_ranks(xs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AverageRanks)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_SpearmanPermutation(benchmark::State& state) {
  const auto xs = sample(200, 2), ys = sample(200, 3);
  const SpearmanOptions opts{static_cast<std::size_t>(state.range(0)), 11};
  for (auto _ : state) benchmark::DoNotOptimize(spearman(xs, ys, opts));
}
BENCHMARK(BM_SpearmanPermutation)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
