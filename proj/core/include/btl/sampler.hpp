#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "btl/analytic.hpp"
#include "btl/geom2d.hpp"
#include "btl/tensor.hpp"

namespace btl {

using Rng = std::mt19937_64;

/// Seed of the independent substream for replicate `index` of a run seeded with `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);
Rng make_rng(std::uint64_t seed, std::uint64_t index);

struct SimulationConfig {
    ModelParams params;
    double L = 1.0;                  ///< side of the periodic simulation window
    int n_reps = 1;
    std::uint64_t seed = 0;
    std::vector<int> s_list{0, 2};   ///< ranks s of the measured Phi_1^{0,s}

    /// Throws std::invalid_argument.
    void validate() const;
};

struct RealizationSummary {
    std::size_t rep_index = 0;
    std::uint64_t seed = 0;          ///< substream seed of the replicate
    std::size_t grains = 0;
    double phi = 0.0;                ///< area fraction
    double V1 = 0.0;                 ///< densities per unit area
    double V0 = 0.0;
    std::map<int, SymTensor2> surface;
    bool ok = true;
    std::string error;
};

/// theta with density c(alpha) |cos theta|^alpha on [0, 2 pi); alpha = inf gives 0.
double sample_orientation(double alpha, Rng& rng);

/// Poisson germs on [0, L)^2, each carrying discretize(E) rotated by an independent
/// orientation draw. Deterministic in (cfg.seed, rep_index).
std::vector<ConvexPolygon> sample_grains(const SimulationConfig& cfg, std::size_t rep_index);
PolyconvexRegion sample_realization(const SimulationConfig& cfg, std::size_t rep_index);

RealizationSummary summarize(const PolyconvexRegion& region, std::span<const int> s_list);

/// Replicates in index order. threads = 0 picks the hardware concurrency. Failing
/// replicates are kept with ok = false and the error message.
std::vector<RealizationSummary> simulate_batch(const SimulationConfig& cfg, unsigned threads = 0);

/// Phi_j^{r,s}(Z cap W) for one (j, r, s).
struct WindowMeasurement {
    int j = 0;
    int r = 0;
    int s = 0;
    SymTensor2 value;
};

struct WindowSummary {
    std::size_t rep_index = 0;
    std::uint64_t seed = 0;
    std::vector<WindowMeasurement> values;
    bool ok = true;
    std::string error;
};

struct WindowIndex {
    int j = 0;
    int r = 0;
    int s = 0;
};

/// Phi_j^{r,s}(Z cap W) computed from a window section. j = 0 requires r = 0.
SymTensor2 measure_window(const WindowSection& section, int j, int r, int s);

/// The window must lie in [0, L)^2 with a margin exceeding the grain diameter.
std::vector<WindowSummary> simulate_window_batch(const SimulationConfig& cfg, const ConvexPolygon& window,
                                                 std::span<const WindowIndex> indices, unsigned threads = 0);

/// Runs task(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace btl
