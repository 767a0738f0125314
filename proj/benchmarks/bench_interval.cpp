#include <benchmark/benchmark.h>

#include "lucky/interval.hpp"
#include "lucky/special.hpp"

using lucky::Interval;

static void BM_log_point(benchmark::State& state) {
    const lucky::PrecisionScope scope(state.range(0));
    std::uint64_t n = 1000003;
    for (auto _ : state) benchmark::DoNotOptimize(lucky::log_of(n++));
}
BENCHMARK(BM_log_point)->Arg(64)->Arg(128)->Arg(256);

static void BM_log_wide(benchmark::State& state) {
    const lucky::PrecisionScope scope(state.range(0));
    const Interval x = Interval::bounds(1000.0, 1001.0);
    for (auto _ : state) benchmark::DoNotOptimize(log(x));
}
BENCHMARK(BM_log_wide)->Arg(128);

static void BM_mul_add(benchmark::State& state) {
    const lucky::PrecisionScope scope(128);
    const Interval a = Interval::decimal("1.1"), b = Interval::decimal("2.7");
    for (auto _ : state) benchmark::DoNotOptimize(a * b + a);
}
BENCHMARK(BM_mul_add);

static void BM_lambert_w(benchmark::State& state) {
    const lucky::PrecisionScope scope(128);
    const Interval x(100000);
    for (auto _ : state) benchmark::DoNotOptimize(lucky::lambert_w(x));
}
BENCHMARK(BM_lambert_w);
