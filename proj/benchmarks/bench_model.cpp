#include <benchmark/benchmark.h>

#include <map>

#include "btl/analytic.hpp"
#include "btl/inference.hpp"

using namespace btl;

namespace {

void BM_GrainAnalyticsEllipse(benchmark::State& state) {
    const int s_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grain_analytics(Ellipse{0.05, 0.0125}, s_max));
}
BENCHMARK(BM_GrainAnalyticsEllipse)->Arg(2)->Arg(32);

void BM_DensitySurfaceTensor(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    const GrainAnalytics g = grain_analytics(Rectangle{0.1, 0.025}, s);
    for (auto _ : state) benchmark::DoNotOptimize(density_surface_tensor_X(300.0, 3.0, g, s));
}
BENCHMARK(BM_DensitySurfaceTensor)->Arg(2)->Arg(8)->Arg(32);

void BM_EulerDensity(benchmark::State& state) {
    const BaseGrain grain = state.range(0) == 0 ? BaseGrain{Rectangle{0.1, 0.025}} : BaseGrain{Ellipse{0.05, 0.0125}};
    const ModelParams params{300.0, 3.0, grain};
    for (auto _ : state) benchmark::DoNotOptimize(euler_density_Z(params));
}
BENCHMARK(BM_EulerDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Bootstrap(benchmark::State& state) {
    Rng rng = make_rng(3, 0);
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i % 17);
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap(values, 1000, rng));
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FourierReconstruction(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const GrainAnalytics g = grain_analytics(Ellipse{0.1, 0.05}, N);
    std::map<int, SymTensor2> tensors;
    for (int s = 0; s <= N; ++s) tensors[s] = density_surface_tensor_X(300.0, 3.0, g, s);
    const std::vector<double> grid = angle_grid(360);
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct_radius(fourier_coefficients(tensors, N), grid));
}
BENCHMARK(BM_FourierReconstruction)->Arg(8)->Arg(32);

}  // namespace
