#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "btl/geom2d.hpp"
#include "btl/sampler.hpp"

namespace btl::experiment {

enum class Mode { Simulate, Analytic, Estimate, Reconstruct, Oracle, Window };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
    Mode mode = Mode::Simulate;
    BaseGrain grain;
    std::vector<double> alphas;
    std::vector<double> phi_targets;   ///< converted to gamma with the simulated grain's area
    std::vector<double> gammas;        ///< used when no phi targets are given
    double L = 1.0;
    int n_reps = 100;
    std::uint64_t seed = 1;
    int n_boot = 10000;
    unsigned threads = 0;
    /// Grain behind the analytic columns: "polygon" (the simulated polygon) or "exact".
    std::string analytics = "polygon";
    std::vector<std::string> estimate_analytics{"polygon", "exact"};
    bool symmetrized_alpha = false;
    int histogram_bins = 30;
    int fourier_order = 32;
    int grid_points = 360;
    std::string source = "analytic";   ///< reconstruct: "analytic" or "simulation"
    int oracle_pairs = 20;
    double oracle_h = 1e-2;            ///< grid step relative to the larger diameter
    double window_side_factor = 5.0;   ///< window side in units of diam(E)
    std::vector<WindowIndex> window_indices;
    std::string out;

    void validate() const;
};

/// Reads a spec document. Unknown keys are rejected.
ExperimentSpec parse_spec(const nlohmann::json& doc);
/// A document with a "runs" array expands to one spec per entry: each entry carries a
/// "name" and overrides the shared top-level fields; its output path gets "_<name>"
/// inserted before the extension. Other documents give a single spec.
std::vector<ExperimentSpec> expand_runs(const nlohmann::json& doc);
/// The fully resolved configuration, as embedded in output headers.
nlohmann::json to_json(const ExperimentSpec& spec);
BaseGrain parse_grain(const nlohmann::json& j);
nlohmann::json grain_to_json(const BaseGrain& g);

struct RunResult {
    int status = 0;                    ///< 0 success, 2 too many failed replicates
    std::vector<std::string> files;
    std::size_t replicates = 0;
    std::size_t failed = 0;
};

/// Executes the experiment and writes its CSV tables. Progress goes to `log`.
RunResult run(const ExperimentSpec& spec, std::ostream& log);

/// Convex polygon with vertices on a random ellipse at random sorted angles, rotated
/// and shifted at random.
ConvexPolygon random_convex_polygon(Rng& rng, int min_vertices = 3, int max_vertices = 12);

/// "{:.17g}" formatting with inf spelled out.
std::string format_number(double v);

}  // namespace btl::experiment
