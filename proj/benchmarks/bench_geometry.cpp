#include <benchmark/benchmark.h>

#include <vector>

#include "btl/geom2d.hpp"
#include "btl/minkowski.hpp"
#include "btl/sampler.hpp"

using namespace btl;

namespace {

SimulationConfig config(double gamma) {
    return {{gamma, 3.0, Ellipse{0.05, 0.0125, 30}}, 1.0, 1, 7, {0, 2}};
}

void BM_SampleGrains(benchmark::State& state) {
    const SimulationConfig cfg = config(static_cast<double>(state.range(0)));
    std::size_t rep = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_grains(cfg, rep++));
}
BENCHMARK(BM_SampleGrains)->Arg(100)->Arg(600);

void BM_TorusUnion(benchmark::State& state) {
    const SimulationConfig cfg = config(static_cast<double>(state.range(0)));
    const std::vector<ConvexPolygon> grains = sample_grains(cfg, 0);
    for (auto _ : state) benchmark::DoNotOptimize(torus_union(grains, TorusWindow{cfg.L}));
    state.counters["grains"] = static_cast<double>(grains.size());
}
BENCHMARK(BM_TorusUnion)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_MeasureRegion(benchmark::State& state) {
    const SimulationConfig cfg = config(600.0);
    const PolyconvexRegion region = sample_realization(cfg, 0);
    const std::vector<int> s_list{0, 2};
    for (auto _ : state) benchmark::DoNotOptimize(measure(region, s_list));
}
BENCHMARK(BM_MeasureRegion);

void BM_MixedV11(benchmark::State& state) {
    const ConvexPolygon p = discretize(Ellipse{1.0, 0.25, static_cast<int>(state.range(0))});
    const ConvexPolygon q = rotate(p, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(mixed_V11(p, q));
}
BENCHMARK(BM_MixedV11)->Arg(8)->Arg(30)->Arg(256);

void BM_TranslativeOracle(benchmark::State& state) {
    const ConvexPolygon p = discretize(Ellipse{1.0, 0.25, 30});
    const ConvexPolygon q = rotate(p, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(translative_oracle(p, q, 2e-2));
}
BENCHMARK(BM_TranslativeOracle)->Unit(benchmark::kMillisecond);

}  // namespace
