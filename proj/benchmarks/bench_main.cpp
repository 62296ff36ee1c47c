#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "bubble/analysis.hpp"
#include "bubble/integrator.hpp"
#include "bubble/mc.hpp"
#include "bubble/regime.hpp"
#include "bubble/rng.hpp"

using namespace bubble;

namespace {

const ModelParams kRegime1{4.0, 3.0, 5.0};
const ResponseSpec kCubic{0.4, 1, false};

void BM_SolveRoots(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_roots(kRegime1, kCubic));
    }
}
BENCHMARK(BM_SolveRoots)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze(kRegime1, kCubic));
    }
}
BENCHMARK(BM_Analyze)->Unit(benchmark::kMillisecond);

void BM_Philox(benchmark::State& state) {
    Philox4x32 eng(1, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eng());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

void BM_GaussianFill(benchmark::State& state) {
    NoiseSource src(NoiseSpec{NoiseFamily::Gaussian, 1, 0});
    std::vector<double> buf(4096);
    for (auto _ : state) {
        src.fill(buf);
        benchmark::DoNotOptimize(buf.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(BM_GaussianFill);

void BM_Simulate(benchmark::State& state) {
    SimConfig c;
    c.horizon = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(kRegime1, kCubic, ConstantFundamental{0.0}, c));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.total_steps()));
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
    const Analysis a = analyze(kRegime1, kCubic);
    SimConfig c;
    c.horizon = 1000.0;
    const Trajectory t = simulate(kRegime1, kCubic, ConstantFundamental{0.0}, c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify_segments(t, a.roots, a.scales));
    }
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

void BM_StabilityKernel(benchmark::State& state) {
    const Analysis a = analyze(kRegime1, kCubic);
    McConfig cfg;
    cfg.replicates = 1000;
    cfg.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            estimate_regime_stability(RegimeLabel::Bubble, kRegime1, kCubic, a.roots, a.scales, cfg));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_StabilityKernel)->Unit(benchmark::kMillisecond);

void BM_CorridorPaths(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_corridor_probability(1.0, 1.0, 1.0, 1000, 1e-3, 3, 1));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CorridorPaths)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
