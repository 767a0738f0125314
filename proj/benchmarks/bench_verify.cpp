#include <benchmark/benchmark.h>

#include "lucky/sieve.hpp"
#include "lucky/verifier.hpp"

namespace {

const lucky::LuckyTable& table() {
    static const lucky::LuckyTable t = lucky::generate(1000000);
    return t;
}

}  // namespace

static void BM_verify_thm_lower(benchmark::State& state) {
    const lucky::StatsContext ctx(table(), 128);
    lucky::BoundStatement s;
    s.form = lucky::Form::ThmLower1;
    const auto hi = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(lucky::verify_range(ctx, s, 1, hi));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_verify_thm_lower)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_verify_tau_upper(benchmark::State& state) {
    const lucky::StatsContext ctx(table(), 128);
    lucky::BoundStatement s;
    s.form = lucky::Form::TauUpper;
    s.constants.emplace("c1", lucky::Interval(1));
    s.constants.emplace("c2", lucky::Interval::decimal("1.32"));
    s.constants.emplace("c3", lucky::Interval::decimal("1.2"));
    for (auto _ : state) benchmark::DoNotOptimize(lucky::verify_range(ctx, s, 100005, 1000000));
}
BENCHMARK(BM_verify_tau_upper)->Unit(benchmark::kMillisecond);
