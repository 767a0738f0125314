#include <benchmark/benchmark.h>

#include "lucky/sieve.hpp"

static void BM_generate(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(lucky::generate(n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_generate)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

static void BM_naive_generate(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(lucky::naive_generate(n));
}
BENCHMARK(BM_naive_generate)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
