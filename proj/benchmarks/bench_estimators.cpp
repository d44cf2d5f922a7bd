#include <benchmark/benchmark.h>

#include <vector>

#include "robust_scale/estimators.hpp"
#include "robust_scale/order_stats.hpp"
#include "robust_scale/rng.hpp"

namespace rs = robust_scale;

namespace {

std::vector<double> normal_input(std::size_t n) {
  rs::RandomStream stream(1, rs::derive_substream(0xBE7C, n, 0));
  std::vector<double> x(n);
  stream.fill_normal(x);
  return x;
}

void BM_QnFast(benchmark::State& state) {
  const auto x = normal_input(static_cast<std::size_t>(state.range(0)));
  const rs::Sample sample(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs::qn_fast(sample));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_QnFast)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity(benchmark::oNLogN);

void BM_SnFast(benchmark::State& state) {
  const auto x = normal_input(static_cast<std::size_t>(state.range(0)));
  const rs::Sample sample(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs::sn_fast(sample));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SnFast)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity(benchmark::oNLogN);

void BM_QnNaive(benchmark::State& state) {
  const auto x = normal_input(static_cast<std::size_t>(state.range(0)));
  const rs::Sample sample(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs::qn_raw_naive(sample));
  }
}
BENCHMARK(BM_QnNaive)->RangeMultiplier(4)->Range(64, 4096);

void BM_SnNaive(benchmark::State& state) {
  const auto x = normal_input(static_cast<std::size_t>(state.range(0)));
  const rs::Sample sample(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs::sn_raw_naive(sample));
  }
}
BENCHMARK(BM_SnNaive)->RangeMultiplier(4)->Range(64, 4096);

void BM_Mad(benchmark::State& state) {
  const auto x = normal_input(static_cast<std::size_t>(state.range(0)));
  const rs::Sample sample(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs::mad_raw(sample));
  }
}
BENCHMARK(BM_Mad)->RangeMultiplier(16)->Range(64, 1 << 20);

void BM_WeightedHighMedian(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  rs::RandomStream stream(2, 7);
  std::vector<rs::WeightedValue> items(n);
  for (auto& item : items) {
    item.value = stream.next_normal();
    item.weight = 1 + static_cast<std::int64_t>(stream.next_u64() % 100);
  }
  for (auto _ : state) {
    auto work = items;
    benchmark::DoNotOptimize(rs::weighted_high_median(work));
  }
}
BENCHMARK(BM_WeightedHighMedian)->RangeMultiplier(16)->Range(1 << 10, 1 << 20);

void BM_NormalGeneration(benchmark::State& state) {
  rs::RandomStream stream(3, 11);
  std::vector<double> block(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    stream.fill_normal(block);
    benchmark::DoNotOptimize(block.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalGeneration)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
