// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `btl_acceptance 1 3 10`.

#include <fmt/core.h>

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "btl/analytic.hpp"
#include "btl/geom2d.hpp"
#include "btl/inference.hpp"
#include "btl/minkowski.hpp"
#include "btl/sampler.hpp"
#include "experiment.hpp"

using namespace btl;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240611;
constexpr int kBoot = 10000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned threads() { return std::max(1U, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff(const SymTensor2& a, const SymTensor2& b) { return max_abs_diff(a, b) / std::max(b.max_abs(), 1e-300); }

// Inclusion-exclusion over the nerve; nonempty intersections of convex sets are contractible.
int nerve_euler(const std::vector<ConvexPolygon>& grains) {
    int chi = 0;
    std::function<void(std::size_t, const ConvexPolygon&, int)> walk = [&](std::size_t next, const ConvexPolygon& acc,
                                                                             int count) {
        chi += count % 2 == 1 ? 1 : -1;
        for (std::size_t i = next; i < grains.size(); ++i)
            if (auto cut = convex_intersect(acc, grains[i])) walk(i + 1, *cut, count + 1);
    };
    for (std::size_t i = 0; i < grains.size(); ++i) walk(i + 1, grains[i], 1);
    return chi;
}

// Rotation average gamma int T(theta) f_alpha(theta) dtheta by tanh-sinh on quarter periods.
SymTensor2 rotation_average_oracle(double gamma, double alpha, const SymTensor2& t) {
    boost::math::quadrature::tanh_sinh<double> ts(12);
    SymTensor2 out(t.rank());
    for (int l = 0; l <= t.rank(); ++l) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k)
            acc += ts.integrate([&](double th) { return t.rotated(th)[l] * orientation_density(alpha, th); }, k * pi / 2,
                                (k + 1) * pi / 2, 1e-13);
        out[l] = gamma * acc;
    }
    return out;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> side(0.05, 5.0), angle(-pi, pi);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = side(gen), b = side(gen), t = angle(gen);
        const ConvexPolygon r = make_rectangle(a, b);
        const double closed = (a * a + b * b) * std::abs(std::sin(t)) + 2 * a * b * std::abs(std::cos(t));
        worst = std::max(worst, std::abs(mixed_V11(rotate(r, t), r) - closed) / closed);
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && secs < 1.0, fmt::format("max rel err {:.2e} (tol 1e-10), {:.3f} s (limit 1 s)", worst, secs)};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(kSeed, 2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ConvexPolygon p = experiment::random_convex_polygon(rng), q = experiment::random_convex_polygon(rng);
        const double h = 1e-2 * std::max(p.diameter(), q.diameter());
        const double value = p.area() + q.area() + mixed_V11(p, q);
        worst = std::max(worst, std::abs(translative_oracle(p, q, h) - value) / value);
    }
    const ConvexPolygon disk = discretize(Ellipse{1.0, 1.0, 256});
    const double disk_mixed = mixed_V11(disk, disk);
    const double disk_oracle = translative_oracle(disk, disk, 1e-2 * disk.diameter()) - 2 * disk.area();
    const double disk_err = std::max(std::abs(disk_mixed - 2 * pi), std::abs(disk_oracle - 2 * pi)) / (2 * pi);
    const double secs = seconds_since(t0);
    return {worst <= 0.01 && disk_err <= 0.01 && secs < 60.0,
            fmt::format("pairs max rel err {:.2e}, disk 0V11 {:.6f} / oracle {:.6f} vs 2pi (rel err {:.2e}; tol 1e-2), "
                        "{:.2f} s (limit 60 s)",
                        worst, disk_mixed, disk_oracle, disk_err, secs)};
}

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0, curve = 0.0;
    for (double a : {0.0, 1.0, 3.0, 25.0}) {
        worst = std::max(worst, std::abs(c0_coeff(a, Ellipse{1.0, 1.0}) - 1.0));
        for (double phi : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double gamma = -std::log(1 - phi) / pi;
            const double ratio = euler_density_Z({gamma, a, Ellipse{1.0, 1.0}}) / gamma;
            curve = std::max(curve, std::abs(ratio - (1 - phi) * (1 + std::log(1 - phi))));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && curve <= 1e-6 && secs < 1.0,
            fmt::format("max |c0 - 1| {:.2e}, max Euler curve err {:.2e} (tol 1e-6), {:.3f} s (limit 1 s)", worst, curve,
                        secs)};
}

// Criteria 4 and 5 share one sweep of 30-gon ellipse simulations.
struct SweepCell {
    double alpha = 0.0;
    double phi = 0.0;
    double gamma = 0.0;
    std::vector<RealizationSummary> reps;
};

struct Sweep {
    std::vector<SweepCell> cells;
    ConvexPolygon polygon;
    double seconds = 0.0;
};

const Sweep& figure_sweep() {
    static const Sweep sweep = [] {
        const auto t0 = std::chrono::steady_clock::now();
        Sweep s;
        const Ellipse e{1.0 / 20, 1.0 / 80, 30};
        s.polygon = discretize(e);
        std::uint64_t k = 0;
        for (double alpha : {0.0, 3.0, 25.0})
            for (double phi : {0.1, 0.3, 0.5, 0.7}) {
                SweepCell c{alpha, phi, -std::log(1 - phi) / s.polygon.area(), {}};
                SimulationConfig cfg{{c.gamma, alpha, e}, 1.0, 100, substream_seed(kSeed, 400 + k++), {0, 2}};
                c.reps = simulate_batch(cfg, threads());
                s.cells.push_back(std::move(c));
            }
        s.seconds = seconds_since(t0);
        return s;
    }();
    return sweep;
}

Outcome criterion4() {
    const Sweep& sw = figure_sweep();
    const GrainAnalytics g = grain_analytics(PolygonGrain{sw.polygon}, 2);
    Rng rng = make_rng(kSeed, 4);
    double worst_z = 0.0;
    int outside = 0, failed = 0;
    std::string where;
    for (const auto& c : sw.cells) {
        std::vector<SymTensor2> values;
        for (const auto& r : c.reps) {
            if (r.ok)
                values.push_back(r.surface.at(2));
            else
                ++failed;
        }
        const TensorBootstrap b = bootstrap(values, kBoot, rng);
        const SymTensor2 model = surface_tensor_curve(c.phi, c1_coeff(c.alpha, g));
        for (int l = 0; l <= 2; ++l) {
            const double z = (b.mean[l] - model[l]) / b.se[l];
            if (std::abs(z) > std::abs(worst_z)) {
                worst_z = z;
                where = fmt::format("alpha={} phi={} comp={}", c.alpha, c.phi, l == 2 ? "11" : l == 1 ? "12" : "22");
            }
            if (std::abs(z) > 3.0) ++outside;
        }
    }
    return {outside == 0 && failed == 0 && sw.seconds <= 600.0,
            fmt::format("{} of 36 components beyond 3 SE, worst z {:+.2f} ({}), {} failed reps, {:.0f} s (limit 600 s)",
                        outside, worst_z, where, failed, sw.seconds)};
}

Outcome criterion5() {
    const Sweep& sw = figure_sweep();
    Rng rng = make_rng(kSeed, 5);
    double worst_z = 0.0;
    int outside = 0;
    std::string where;
    for (const auto& c : sw.cells) {
        std::vector<double> values;
        for (const auto& r : c.reps)
            if (r.ok) values.push_back(r.V0 / c.gamma);
        const BootstrapResult b = bootstrap(values, kBoot, rng);
        const double model = euler_curve(c.phi, c0_coeff(c.alpha, PolygonGrain{sw.polygon}));
        const double z = (b.mean - model) / b.se;
        if (std::abs(z) > std::abs(worst_z)) {
            worst_z = z;
            where = fmt::format("alpha={} phi={}", c.alpha, c.phi);
        }
        if (std::abs(z) > 3.0) ++outside;
    }

    std::mt19937_64 gen(kSeed + 5);
    std::uniform_real_distribution<double> pos(4.0, 6.0), ang(0.0, pi), size(0.3, 1.0);
    std::uniform_int_distribution<int> count(1, 10);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ConvexPolygon> grains;
        const int n = count(gen);
        for (int i = 0; i < n; ++i) {
            const double r = size(gen);
            const ConvexPolygon base = trial % 2 ? make_rectangle(2 * r, 0.6 * r) : discretize(Ellipse{r, 0.4 * r, 16});
            grains.push_back(rotate(base, ang(gen)).translated({pos(gen), pos(gen)}));
        }
        if (euler_characteristic(torus_union(grains, TorusWindow{10.0})) != nerve_euler(grains)) ++mismatches;
    }
    return {outside == 0 && mismatches == 0,
            fmt::format("{} of 12 cells beyond 3 SE, worst z {:+.2f} ({}); Gauss-Bonnet vs nerve mismatches {} of 200",
                        outside, worst_z, where, mismatches)};
}

// Criteria 6 and 7 share their setting: phi = 1/15, alpha = 3, 1000 replicates.
constexpr double kEstimatorAlpha = 3.0;

EstimatorReport estimator_run(const BaseGrain& grain, const GrainAnalytics& analytics, std::string label,
                              std::uint64_t stream) {
    const double area = discretize(grain).area();
    const double gamma = std::log(15.0 / 14.0) / area;
    SimulationConfig cfg{{gamma, kEstimatorAlpha, grain}, 1.0, 1000, substream_seed(kSeed, stream), {0, 2}};
    const auto reps = simulate_batch(cfg, threads());
    Rng rng = make_rng(kSeed, stream + 1);
    return estimate_replicates(reps, analytics, std::move(label), gamma, kEstimatorAlpha, kBoot, rng);
}

Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    const BaseGrain rect = Rectangle::from_semi_axes(1.0 / 100, 1.0 / 400);
    const EstimatorReport r = estimator_run(rect, grain_analytics(rect, 2), "exact", 600);
    const double zg = r.gamma_bias / r.gamma.se, za = r.alpha_bias / r.alpha.se;
    const double secs = seconds_since(t0);
    return {std::abs(zg) <= 3.0 && std::abs(za) <= 3.0 && secs <= 1200.0,
            fmt::format("gamma {:.2f} +- {:.2f} vs {:.2f} (z {:+.2f}); alpha {:.4f} +- {:.4f} vs 3 (z {:+.2f}); "
                        "{} diverged; {:.0f} s (limit 1200 s)",
                        r.gamma.mean, r.gamma.se, r.gamma_true, zg, r.alpha.mean, r.alpha.se, za, r.diverged, secs)};
}

Outcome criterion7() {
    const Ellipse e{1.0 / 100, 1.0 / 400, 30};
    const EstimatorReport exact = estimator_run(e, grain_analytics(e, 2), "exact", 700);
    const EstimatorReport poly = estimator_run(e, grain_analytics(PolygonGrain{discretize(e)}, 2), "polygon", 700);
    const double z_exact = exact.alpha_bias / exact.alpha.se, z_poly = poly.alpha_bias / poly.alpha.se;
    return {std::abs(z_exact) >= 3.0,
            fmt::format("true-ellipse analytics: alpha {:.4f} +- {:.4f} (shift {:+.2f} SE); "
                        "30-gon analytics: alpha {:.4f} +- {:.4f} (shift {:+.2f} SE)",
                        exact.alpha.mean, exact.alpha.se, z_exact, poly.alpha.mean, poly.alpha.se, z_poly)};
}

Outcome criterion8() {
    double round_trip = 0.0, curve = 0.0, trace = 0.0;
    for (const BaseGrain& grain : {BaseGrain{Ellipse{0.05, 0.0125}}, BaseGrain{Rectangle{0.1, 0.025}}}) {
        const GrainAnalytics g = grain_analytics(grain, 2);
        for (double a : {0.0, 0.5, 1.0, 3.0, 10.0, 25.0, 50.0})
            for (double phi : {0.1, 0.5, 0.9}) {
                const ModelParams params{-std::log(1 - phi) / g.V2, a, grain};
                const SymTensor2 z = surface_tensor_density_Z(params, 2);
                const double fwd_phi = volume_fraction(params);
                for (AlphaForm form : {AlphaForm::Component11, AlphaForm::Symmetrized})
                    round_trip = std::max(round_trip, std::abs(estimate_alpha(z, fwd_phi, g, form) - a));
                curve = std::max(curve, rel_diff(surface_tensor_curve(fwd_phi, c1_coeff(a, g)), z));
            }
    }
    SimulationConfig cfg{{400.0, 3.0, Ellipse{0.05, 0.0125}}, 1.0, 40, kSeed, {0, 2}};
    for (const auto& r : simulate_batch(cfg, threads()))
        if (r.ok) trace = std::max(trace, std::abs(r.surface.at(2).trace() - r.V1 / (4 * pi)) / r.V1);
    return {round_trip <= 1e-8 && curve <= 1e-12 && trace <= 1e-12,
            fmt::format("round trip max err {:.2e} (tol 1e-8), curve identity rel err {:.2e}, "
                        "trace identity rel err {:.2e} over 40 realizations (tol 1e-12)",
                        round_trip, curve, trace)};
}

Outcome criterion9() {
    const double constant = isotropic_constant(2, 1, 2);
    const double c_err = std::abs(constant - 1 / (8 * pi)) * 8 * pi;
    double worst = 0.0;
    const std::vector<BaseGrain> grains{Ellipse{0.05, 0.0125}, Rectangle{0.1, 0.025},
                                        PolygonGrain{ConvexPolygon({{0, 0}, {0.1, 0}, {0.02, 0.07}})}};
    for (const auto& grain : grains)
        for (double gamma : {50.0, 400.0}) {
            const ModelParams params{gamma, 0.0, grain};
            const SymTensor2 model = q_power(2) * (constant * intrinsic_volume_densities_Z(params).V1);
            worst = std::max(worst, rel_diff(surface_tensor_density_Z(params, 2), model));
        }
    return {c_err <= 1e-10 && worst <= 1e-10,
            fmt::format("a~(2,1,2) rel err {:.2e}, isotropic tensor rel err {:.2e} (tol 1e-10)", c_err, worst)};
}

Outcome criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr int N = 32;
    const std::vector<double> grid = angle_grid(720);
    const auto reconstruct = [&](const BaseGrain& grain, double gamma, double alpha) {
        const GrainAnalytics g = grain_analytics(grain, N);
        std::map<int, SymTensor2> tensors;
        for (int s = 0; s <= N; ++s) tensors[s] = density_surface_tensor_X(gamma, alpha, g, s);
        return reconstruct_radius(fourier_coefficients(tensors, N), grid);
    };
    const double p = 0.1, q = 0.05, gamma = 300.0;
    const RadiusFunction rf = reconstruct(Ellipse{p, q}, gamma, kAlphaInfinity);
    double ellipse_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double c = std::cos(grid[i]), s = std::sin(grid[i]);
        const double ref = gamma * p * p * q * q / std::pow(p * p * c * c + q * q * s * s, 1.5);
        ellipse_err = std::max(ellipse_err, std::abs(rf.g[i] - ref) / ref);
    }
    double disk_err = 0.0;
    for (double a : {0.0, 3.0, kAlphaInfinity}) {
        const RadiusFunction d = reconstruct(Ellipse{0.05, 0.05}, gamma, a);
        for (double v : d.g) disk_err = std::max(disk_err, std::abs(v - gamma * 0.05) / (gamma * 0.05));
    }
    const double secs = seconds_since(t0);
    return {ellipse_err <= 0.01 && disk_err <= 1e-10 && secs < 10.0,
            fmt::format("aligned ellipse sup rel err {:.2e} (tol 1e-2), disk rel err {:.2e} (tol 1e-10), "
                        "{:.2f} s (limit 10 s)",
                        ellipse_err, disk_err, secs)};
}

Outcome criterion11() {
    double worst = 0.0;
    for (const BaseGrain& grain : {BaseGrain{Ellipse{1.0, 0.25}}, BaseGrain{Rectangle{2.0, 0.5}}}) {
        const GrainAnalytics g = grain_analytics(grain, 6);
        for (double a : {0.0, 1.0, 3.0, 25.0})
            for (int s = 0; s <= 6; ++s) {
                const SymTensor2 oracle = rotation_average_oracle(2.0, a, g.phi(s));
                worst = std::max(worst, max_abs_diff(density_surface_tensor_X(2.0, a, g, s), oracle) /
                                            std::max(1.0, oracle.max_abs()));
            }
    }
    return {worst <= 1e-8, fmt::format("max err vs rotation-average quadrature {:.2e} (tol 1e-8)", worst)};
}

Outcome criterion12() {
    const auto t0 = std::chrono::steady_clock::now();
    const BaseGrain grain = Rectangle::from_semi_axes(0.05, 0.0125);
    const double diam = discretize(grain).diameter(), side = 5 * diam, L = 0.75;
    const ConvexPolygon window = make_rectangle(side, side).translated({L / 2, L / 2});
    const ModelParams params{std::log(2.0) / discretize(grain).area(), 3.0, grain};
    const std::vector<WindowIndex> indices{{1, 0, 0}, {1, 0, 2}, {1, 1, 0}, {1, 1, 2}, {2, 0, 0}, {2, 1, 0}};
    SimulationConfig cfg{params, L, 500, substream_seed(kSeed, 1200), {}};
    const auto reps = simulate_window_batch(cfg, window, indices, threads());
    Rng rng = make_rng(kSeed, 12);
    int outside = 0, checks = 0, failed = 0;
    double worst_z = 0.0;
    std::string where;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto [j, r, s] = indices[k];
        std::vector<SymTensor2> values;
        for (const auto& rep : reps) {
            if (rep.ok)
                values.push_back(rep.values[k].value);
            else if (k == 0)
                ++failed;
        }
        const TensorBootstrap b = bootstrap(values, kBoot, rng);
        const SymTensor2 model = mean_value_window(params, window, j, r, s);
        for (int l = 0; l <= model.rank(); ++l) {
            const double z = (b.mean[l] - model[l]) / b.se[l];
            ++checks;
            if (std::abs(z) > 3.0) ++outside;
            if (std::abs(z) > std::abs(worst_z)) {
                worst_z = z;
                where = fmt::format("j={} r={} s={} comp {}", j, r, s, l);
            }
        }
    }
    const double secs = seconds_since(t0);
    return {outside == 0 && failed == 0 && secs <= 600.0,
            fmt::format("{} of {} components beyond 3 SE, worst z {:+.2f} ({}), {} failed reps, {:.0f} s (limit 600 s)",
                        outside, checks, worst_z, where, failed, secs)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"mixed functional closed form", criterion1},   {"translative oracle", criterion2},
        {"disk Euler curve", criterion3},               {"surface tensor sweep", criterion4},
        {"Euler characteristic sweep", criterion5},     {"estimators on rectangles", criterion6},
        {"polygon bias detection", criterion7},         {"round-trip identities", criterion8},
        {"isotropy constants", criterion9},             {"Fourier reconstruction", criterion10},
        {"general-rank density", criterion11},          {"window mean values", criterion12},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        fmt::print("{} C{:<2} {}: {}\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
