#include "btl/sampler.hpp"

#include <atomic>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "btl/minkowski.hpp"

namespace btl {

namespace {

constexpr double pi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string describe_failure(const std::exception& e, std::uint64_t seed, std::size_t rep) {
    return std::string(e.what()) + " (replicate " + std::to_string(rep) + ", substream seed " + std::to_string(seed) + ")";
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng(substream_seed(seed, index)); }

void SimulationConfig::validate() const {
    params.validate();
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("SimulationConfig: L must be positive");
    if (n_reps < 1) throw std::invalid_argument("SimulationConfig: n_reps must be >= 1");
    if (discretize(params.grain).diameter() >= L)
        throw std::invalid_argument("SimulationConfig: grain diameter must be below L");
    for (int s : s_list)
        if (s < 0) throw std::invalid_argument("SimulationConfig: negative tensor rank");
}

double sample_orientation(double alpha, Rng& rng) {
    if (std::isnan(alpha) || alpha < 0.0) throw std::invalid_argument("sample_orientation: alpha must be >= 0");
    if (std::isinf(alpha)) return 0.0;
    // B ~ Beta(1/2, (alpha+1)/2) gives beta = arcsin(sqrt B) with density ~ cos^alpha on [0, pi/2].
    boost::random::beta_distribution<double> beta(0.5, 0.5 * (alpha + 1.0));
    const double b = std::asin(std::sqrt(beta(rng)));
    switch (boost::random::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return b;
        case 1: return pi - b;
        case 2: return pi + b;
        default: return b == 0.0 ? 0.0 : 2 * pi - b;
    }
}

std::vector<ConvexPolygon> sample_grains(const SimulationConfig& cfg, std::size_t rep_index) {
    Rng rng = make_rng(cfg.seed, rep_index);
    const double mean = cfg.params.gamma * cfg.L * cfg.L;
    const long n = boost::random::poisson_distribution<long, double>(mean)(rng);
    const ConvexPolygon base = discretize(cfg.params.grain);
    boost::random::uniform_real_distribution<double> coord(0.0, cfg.L);
    std::vector<ConvexPolygon> grains;
    grains.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double x = coord(rng);
        const double y = coord(rng);
        const double theta = sample_orientation(cfg.params.alpha, rng);
        grains.push_back(rotate(base, theta).translated({x, y}));
    }
    return grains;
}

PolyconvexRegion sample_realization(const SimulationConfig& cfg, std::size_t rep_index) {
    const auto grains = sample_grains(cfg, rep_index);
    return torus_union(grains, TorusWindow{cfg.L});
}

RealizationSummary summarize(const PolyconvexRegion& region, std::span<const int> s_list) {
    const FunctionalSet f = measure(region, s_list);
    RealizationSummary out;
    out.grains = region.grains.size();
    out.phi = f.V2;
    out.V1 = f.V1;
    out.V0 = f.V0;
    out.surface = f.surface;
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) task(i);
        });
}

std::vector<RealizationSummary> simulate_batch(const SimulationConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<RealizationSummary> out(static_cast<std::size_t>(cfg.n_reps));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        const std::uint64_t seed = substream_seed(cfg.seed, i);
        try {
            out[i] = summarize(sample_realization(cfg, i), cfg.s_list);
        } catch (const std::exception& e) {
            out[i].ok = false;
            out[i].error = describe_failure(e, seed, i);
        }
        out[i].rep_index = i;
        out[i].seed = seed;
    });
    return out;
}

SymTensor2 measure_window(const WindowSection& section, int j, int r, int s) {
    switch (j) {
        case 0:
            if (r != 0) throw std::invalid_argument("measure_window: j = 0 requires r = 0");
            return euler_point_tensor(section.euler, s);
        case 1:
            return surface_tensor_segments(section.boundary, r, s);
        case 2:
            if (s != 0) throw std::invalid_argument("measure_window: j = 2 requires s = 0");
            return volume_moment_segments(section.boundary, r);
        default:
            throw std::invalid_argument("measure_window: j must be 0, 1 or 2");
    }
}

std::vector<WindowSummary> simulate_window_batch(const SimulationConfig& cfg, const ConvexPolygon& window,
                                                 std::span<const WindowIndex> indices, unsigned threads) {
    cfg.validate();
    const double margin = discretize(cfg.params.grain).diameter();
    for (Vec2 v : window.vertices())
        if (v.x <= margin || v.y <= margin || v.x >= cfg.L - margin || v.y >= cfg.L - margin)
            throw std::invalid_argument("simulate_window_batch: window must keep a grain-diameter margin inside [0, L)^2");
    for (const auto& ix : indices) measure_window(WindowSection{}, ix.j, ix.r, ix.s);  // validates the indices

    std::vector<WindowSummary> out(static_cast<std::size_t>(cfg.n_reps));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        const std::uint64_t seed = substream_seed(cfg.seed, i);
        try {
            const WindowSection section = section_with_window(sample_realization(cfg, i), window);
            for (const auto& ix : indices) out[i].values.push_back({ix.j, ix.r, ix.s, measure_window(section, ix.j, ix.r, ix.s)});
        } catch (const std::exception& e) {
            out[i].values.clear();
            out[i].ok = false;
            out[i].error = describe_failure(e, seed, i);
        }
        out[i].rep_index = i;
        out[i].seed = seed;
    });
    return out;
}

}  // namespace btl
