#include <benchmark/benchmark.h>

#include "wcp/kernel_full.hpp"
#include "wcp/kernel_typed.hpp"
#include "wcp/meanfield.hpp"
#include "wcp/oracle.hpp"
#include "wcp/rng.hpp"
#include "wcp/weight_law.hpp"

namespace {

void BM_FullKernelEvents(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    const wcp::WeightSample sample =
        wcp::sample_weights(wcp::WeightLaw::pareto(3.5, 1.0), n, 4096);
    wcp::FullState sim(sample, wcp::InitSpec::all());
    wcp::Xoshiro256 rng(7);
    for (auto _ : state) {
        if (sim.count_infected() == 0) {
            state.PauseTiming();
            sim = wcp::FullState(sample, wcp::InitSpec::all());
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(sim.step(1.0, rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FullKernelEvents)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

void BM_TypedKernelEvents(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    wcp::TypedState sim;
    sim.n = n;
    sim.lambda = 1.0;
    sim.W = {1.0, 2.0};
    sim.N = {n / 2, n - n / 2};
    sim.X = {n / 4, n / 4};
    sim.recompute_cached();
    wcp::Xoshiro256 rng(9);
    for (auto _ : state) {
        if (sim.total_infected == 0) {
            state.PauseTiming();
            sim.X = {n / 4, n / 4};
            sim.recompute_cached();
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(wcp::typed_step(sim, rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TypedKernelEvents)->Arg(1 << 20)->Arg(100000000);

void BM_SigmaDiscrete(benchmark::State& state) {
    const auto law = wcp::WeightLaw::discrete({1.0, 2.0}, {0.5, 0.5});
    for (auto _ : state) benchmark::DoNotOptimize(wcp::sigma(law, 1.0));
}
BENCHMARK(BM_SigmaDiscrete);

void BM_SigmaPareto(benchmark::State& state) {
    const auto law = wcp::WeightLaw::pareto(3.5, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(wcp::sigma(law, 0.3));
}
BENCHMARK(BM_SigmaPareto);

void BM_OracleUniformization(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    const wcp::WeightSample sample =
        wcp::sample_weights(wcp::WeightLaw::discrete({1.0, 2.0}, {0.5, 0.5}), n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            wcp::exact_marginals(sample, 1.5, 2.0, wcp::InitSpec::all()));
}
BENCHMARK(BM_OracleUniformization)->Arg(8)->Arg(10)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
