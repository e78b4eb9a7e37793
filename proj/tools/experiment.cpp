#include "experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include "btl/analytic.hpp"
#include "btl/inference.hpp"
#include "btl/minkowski.hpp"
#include "btl/quadrature.hpp"

namespace btl::experiment {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_alpha(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kAlphaInfinity;
        throw ConfigError("alpha: expected a number or \"inf\", got \"" + s + "\"");
    }
    if (!v.is_number()) throw ConfigError("alpha: expected a number or \"inf\"");
    return v.get<double>();
}

json alpha_to_json(double a) { return std::isinf(a) ? json("inf") : json(a); }

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
    return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

class Table {
public:
    Table(const std::string& path, const json& config, const std::string& title, std::vector<std::string> columns)
        : out_(path), width_(columns.size()) {
        if (!out_) throw ConfigError("cannot open output file " + path);
        out_ << "# btl " << BTL_VERSION_STRING << '\n';
        out_ << "# table: " << title << '\n';
        out_ << "# config: " << config.dump() << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    template <class... Ts>
    void row(const Ts&... cells) {
        static_assert(sizeof...(Ts) > 0);
        if (sizeof...(Ts) != width_) throw std::logic_error("Table: row width mismatch");
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cell(cells)), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::ofstream out_;
    std::size_t width_;
};

std::string derived_path(const std::string& out, const std::string& suffix) {
    const auto dot = out.rfind('.');
    const auto slash = out.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + suffix + ".csv";
    return out.substr(0, dot) + suffix + out.substr(dot);
}

// The grain actually placed in simulations.
BaseGrain simulated_grain(const BaseGrain& g) {
    if (std::holds_alternative<Ellipse>(g)) return PolygonGrain{discretize(g)};
    return g;
}

BaseGrain analytic_grain(const ExperimentSpec& spec, const std::string& choice) {
    return choice == "exact" ? spec.grain : simulated_grain(spec.grain);
}

struct Cell {
    double alpha;
    double phi_target;   ///< NaN when the sweep is over gamma
    double gamma;
    std::uint64_t seed;
};

std::vector<Cell> cells(const ExperimentSpec& spec) {
    const double area = discretize(simulated_grain(spec.grain)).area();
    std::vector<Cell> out;
    std::uint64_t k = 0;
    for (double a : spec.alphas) {
        if (!spec.phi_targets.empty()) {
            for (double phi : spec.phi_targets)
                out.push_back({a, phi, -std::log1p(-phi) / area, substream_seed(spec.seed, (1ULL << 32) + k++)});
        } else {
            for (double g : spec.gammas) out.push_back({a, kNaN, g, substream_seed(spec.seed, (1ULL << 32) + k++)});
        }
    }
    return out;
}

SimulationConfig sim_config(const ExperimentSpec& spec, const Cell& c, std::vector<int> s_list) {
    SimulationConfig cfg;
    cfg.params = {c.gamma, c.alpha, spec.grain};
    cfg.L = spec.L;
    cfg.n_reps = spec.n_reps;
    cfg.seed = c.seed;
    cfg.s_list = std::move(s_list);
    return cfg;
}

template <class R>
std::size_t count_failed(const std::vector<R>& reps, std::ostream& log) {
    std::size_t failed = 0;
    for (const auto& r : reps)
        if (!r.ok) {
            ++failed;
            log << "replicate failed: " << r.error << '\n';
        }
    return failed;
}

void run_simulate(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    Table t(spec.out, config, "simulate",
            {"alpha", "phi_target", "gamma", "rep_count", "phi_hat", "phi_se", "v1_hat", "v1_se", "chi_hat", "chi_se",
             "t11_hat", "t11_se", "t22_hat", "t22_se", "t12_hat", "t12_se", "t11_analytic", "t22_analytic",
             "t12_analytic", "chi_analytic"});
    res.files.push_back(spec.out);
    const BaseGrain ag = analytic_grain(spec, spec.analytics);
    for (const Cell& c : cells(spec)) {
        log << fmt::format("simulate alpha={} gamma={:.6g}\n", format_number(c.alpha), c.gamma);
        const auto reps = simulate_batch(sim_config(spec, c, {2}), spec.threads);
        res.replicates += reps.size();
        res.failed += count_failed(reps, log);
        std::vector<double> phi, v1, v0, t11, t22, t12;
        for (const auto& r : reps) {
            if (!r.ok) continue;
            phi.push_back(r.phi);
            v1.push_back(r.V1);
            v0.push_back(r.V0);
            const SymTensor2& s2 = r.surface.at(2);
            t11.push_back(s2.m(1, 1));
            t22.push_back(s2.m(2, 2));
            t12.push_back(s2.m(1, 2));
        }
        if (phi.empty()) continue;
        Rng rng = make_rng(c.seed, ~0ULL);
        const std::span<const double> cols[] = {phi, v1, v0, t11, t22, t12};
        const auto b = bootstrap_columns(cols, spec.n_boot, rng);
        const ModelParams ap{c.gamma, c.alpha, ag};
        const SymTensor2 dens = surface_tensor_density_Z(ap, 2);
        t.row(c.alpha, c.phi_target, c.gamma, phi.size(), b[0].mean, b[0].se, b[1].mean, b[1].se, b[2].mean, b[2].se,
              b[3].mean, b[3].se, b[4].mean, b[4].se, b[5].mean, b[5].se, dens.m(1, 1), dens.m(2, 2), dens.m(1, 2),
              euler_density_Z(ap));
    }
}

void run_analytic(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    Table t(spec.out, config, "analytic",
            {"alpha", "phi", "gamma", "t11", "t22", "t12", "chi", "chi_over_gamma", "c1_11", "c1_22", "c1_12", "c0",
             "anisotropy"});
    res.files.push_back(spec.out);
    std::vector<double> phis = spec.phi_targets;
    const GrainAnalytics g = grain_analytics(spec.grain, 2);
    if (phis.empty())
        for (double gamma : spec.gammas) phis.push_back(-std::expm1(-gamma * g.V2));
    for (double a : spec.alphas) {
        log << "analytic alpha=" << format_number(a) << '\n';
        const SymTensor2 c1 = c1_coeff(a, g);
        const double c0 = c0_coeff(a, spec.grain);
        const SymTensor2 x = density_surface_tensor_X(1.0, a, g, 2);
        const double aniso = x.m(1, 1) / x.m(2, 2);
        for (double phi : phis) {
            const double gamma = -std::log1p(-phi) / g.V2;
            const SymTensor2 z = surface_tensor_curve(phi, c1);
            const double chi_g = euler_curve(phi, c0);
            t.row(a, phi, gamma, z.m(1, 1), z.m(2, 2), z.m(1, 2), gamma * chi_g, chi_g, c1.m(1, 1), c1.m(2, 2), c1.m(1, 2),
                  c0, aniso);
        }
    }
}

std::vector<double> histogram(const std::vector<double>& v, int bins, double& lo, double& hi) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    if (hi == lo) hi = lo + 1.0;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double x : v) {
        auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * bins);
        counts[std::min(k, counts.size() - 1)] += 1.0;
    }
    return counts;
}

void run_estimate(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    const std::string sum_path = derived_path(spec.out, "_summary");
    const std::string hist_path = derived_path(spec.out, "_histogram");
    Table reps_t(spec.out, config, "estimate replicates",
                 {"alpha", "phi_target", "gamma", "analytics", "rep", "gamma_hat", "alpha_hat"});
    Table sum_t(sum_path, config, "estimate summary",
                {"alpha", "phi_target", "gamma", "analytics", "n", "diverged", "gamma_mean", "gamma_se", "gamma_bias",
                 "gamma_z", "alpha_mean", "alpha_se", "alpha_bias", "alpha_z"});
    Table hist_t(hist_path, config, "estimate histograms",
                 {"alpha", "phi_target", "analytics", "quantity", "bin_lo", "bin_hi", "count"});
    res.files.insert(res.files.end(), {spec.out, sum_path, hist_path});
    const AlphaForm form = spec.symmetrized_alpha ? AlphaForm::Symmetrized : AlphaForm::Component11;
    if (spec.symmetrized_alpha) sum_t.comment("alpha-hat uses the symmetrized (1,1)/(2,2) estimator");

    for (const Cell& c : cells(spec)) {
        log << fmt::format("estimate alpha={} gamma={:.6g}\n", format_number(c.alpha), c.gamma);
        const auto reps = simulate_batch(sim_config(spec, c, {2}), spec.threads);
        res.replicates += reps.size();
        res.failed += count_failed(reps, log);
        for (const auto& label : spec.estimate_analytics) {
            const GrainAnalytics g = grain_analytics(analytic_grain(spec, label), 2);
            for (const auto& r : reps) {
                if (!r.ok) continue;
                double ah = kNaN;
                try {
                    ah = estimate_alpha(r.surface.at(2), r.phi, g, form);
                } catch (const AlphaDivergence&) {
                }
                reps_t.row(c.alpha, c.phi_target, c.gamma, label, r.rep_index, estimate_gamma(r.phi, g.V2), ah);
            }
            Rng rng = make_rng(c.seed, ~0ULL);
            const EstimatorReport rep = estimate_replicates(reps, g, label, c.gamma, c.alpha, spec.n_boot, rng, form);
            sum_t.row(c.alpha, c.phi_target, c.gamma, label, rep.gamma_hat.size(), rep.diverged, rep.gamma.mean,
                      rep.gamma.se, rep.gamma_bias, rep.gamma.se > 0 ? rep.gamma_bias / rep.gamma.se : kNaN,
                      rep.alpha.mean, rep.alpha.se, rep.alpha_bias, rep.alpha.se > 0 ? rep.alpha_bias / rep.alpha.se : kNaN);
            for (const auto& [name, values] : {std::pair{"gamma_hat", &rep.gamma_hat}, std::pair{"alpha_hat", &rep.alpha_hat}}) {
                if (values->empty()) continue;
                double lo, hi;
                const auto counts = histogram(*values, spec.histogram_bins, lo, hi);
                const double w = (hi - lo) / spec.histogram_bins;
                for (std::size_t k = 0; k < counts.size(); ++k)
                    hist_t.row(c.alpha, c.phi_target, label, name, lo + w * double(k), lo + w * double(k + 1), counts[k]);
            }
        }
    }
}

// gamma int r(E, u(phi - theta)) f_alpha(theta) dtheta for ellipses; NaN otherwise.
double radius_reference(const BaseGrain& grain, double gamma, double alpha, double phi) {
    const auto* e = std::get_if<Ellipse>(&grain);
    if (!e) return kNaN;
    if (std::isinf(alpha)) return gamma * ellipse_curvature_radius(e->p, e->q, phi);
    const double breaks[] = {pi / 2, pi, 3 * pi / 2};
    return gamma * integrate([&](double t) { return ellipse_curvature_radius(e->p, e->q, phi - t) * orientation_density(alpha, t); },
                             0.0, 2 * pi, breaks, {1e-10, 1e-300, 15});
}

void run_reconstruct(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    const std::string coef_path = derived_path(spec.out, "_coefficients");
    Table t(spec.out, config, "reconstruct", {"alpha", "gamma", "angle", "g", "g_reference"});
    Table ct(coef_path, config, "Fourier coefficients", {"alpha", "gamma", "s", "re", "im", "se_re", "se_im"});
    res.files.insert(res.files.end(), {spec.out, coef_path});
    const int N = spec.fourier_order;
    const auto grid = angle_grid(spec.grid_points);
    for (const Cell& c : cells(spec)) {
        log << fmt::format("reconstruct alpha={} gamma={:.6g} source={}\n", format_number(c.alpha), c.gamma, spec.source);
        std::map<int, SymTensor2> tensors, se;
        if (spec.source == "analytic") {
            const GrainAnalytics g = grain_analytics(spec.grain, N);
            for (int s = 0; s <= N; ++s) tensors[s] = density_surface_tensor_X(c.gamma, c.alpha, g, s);
        } else {
            std::vector<int> s_list;
            for (int s = 0; s <= N; ++s) s_list.push_back(s);
            const auto reps = simulate_batch(sim_config(spec, c, s_list), spec.threads);
            res.replicates += reps.size();
            res.failed += count_failed(reps, log);
            std::vector<double> phi;
            std::map<int, std::vector<SymTensor2>> per_s;
            for (const auto& r : reps) {
                if (!r.ok) continue;
                phi.push_back(r.phi);
                for (int s = 0; s <= N; ++s) per_s[s].push_back(r.surface.at(s));
            }
            if (phi.empty()) continue;
            double phi_mean = 0.0;
            for (double p : phi) phi_mean += p;
            phi_mean /= double(phi.size());
            // Phi-bar(X) = Phi-bar(Z) / (1 - phi).
            const double scale = 1.0 / (1.0 - phi_mean);
            for (int s = 0; s <= N; ++s) {
                Rng rng = make_rng(c.seed, ~0ULL - 1 - std::uint64_t(s));
                const auto b = bootstrap(per_s[s], spec.n_boot, rng);
                tensors[s] = b.mean * scale;
                se[s] = b.se * scale;
            }
        }
        const FourierSeries f = fourier_coefficients(tensors, se, N);
        for (int s = 0; s <= N; ++s) {
            const auto se_s = f.se.empty() ? std::complex<double>(0.0, 0.0) : f.se[std::size_t(s + N)];
            ct.row(c.alpha, c.gamma, s, f(s).real(), f(s).imag(), se_s.real(), se_s.imag());
        }
        const RadiusFunction r = reconstruct_radius(f, grid);
        t.comment(fmt::format("alpha={} gamma={} N={} max_imag={}", format_number(c.alpha), format_number(c.gamma), N,
                              format_number(r.max_imag)));
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.row(c.alpha, c.gamma, r.phi[i], r.g[i], radius_reference(spec.grain, c.gamma, c.alpha, r.phi[i]));
    }
}

void run_oracle(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    Table t(spec.out, config, "mixed functional verification", {"kind", "index", "mixed", "reference", "rel_err"});
    res.files.push_back(spec.out);
    Rng rng = make_rng(spec.seed, 0);
    log << "oracle: " << spec.oracle_pairs << " random polygon pairs\n";
    for (int i = 0; i < spec.oracle_pairs; ++i) {
        const ConvexPolygon p = random_convex_polygon(rng), q = random_convex_polygon(rng);
        const double h = spec.oracle_h * std::max(p.diameter(), q.diameter());
        const double mixed = mixed_V11(p, q);
        const double ref = translative_oracle(p, q, h) - p.area() - q.area();
        const double total = p.area() + q.area() + mixed;
        t.row("translative", i, mixed, ref, std::abs(ref - mixed) / total);
    }
    boost::random::uniform_real_distribution<double> side(0.1, 2.0), angle(0.0, 2 * pi);
    for (int i = 0; i < spec.oracle_pairs; ++i) {
        const double a = side(rng), b = side(rng), th = angle(rng);
        const ConvexPolygon r = make_rectangle(a, b);
        const double mixed = mixed_V11(rotate(r, th), r);
        const double ref = (a * a + b * b) * std::abs(std::sin(th)) + 2 * a * b * std::abs(std::cos(th));
        t.row("rectangle", i, mixed, ref, std::abs(mixed - ref) / ref);
    }
    const ConvexPolygon disk = discretize(Ellipse{1.0, 1.0, 256});
    const double h = spec.oracle_h * disk.diameter();
    const double ref = translative_oracle(disk, disk, h) - 2 * disk.area();
    const double mixed = mixed_V11(disk, disk);
    t.row("disk", 0, mixed, 2 * pi, std::abs(mixed - 2 * pi) / (2 * pi));
    t.row("disk_translative", 0, ref, 2 * pi, std::abs(ref - 2 * pi) / (2 * pi));
}

void run_window(const ExperimentSpec& spec, const json& config, RunResult& res, std::ostream& log) {
    Table t(spec.out, config, "window mean values",
            {"alpha", "phi_target", "gamma", "j", "r", "s", "component", "rep_count", "mc_mean", "mc_se", "analytic", "z"});
    res.files.push_back(spec.out);
    const double diam = discretize(spec.grain).diameter();
    const double side = spec.window_side_factor * diam;
    const ConvexPolygon W = make_rectangle(side, side).translated({spec.L / 2, spec.L / 2});
    const BaseGrain ag = analytic_grain(spec, spec.analytics);
    std::vector<WindowIndex> idx = spec.window_indices;
    if (idx.empty())
        for (int j : {0, 1, 2})
            for (int r : {0, 1})
                for (int s : {0, 2})
                    if (!(j == 0 && r != 0) && !(j == 2 && s != 0)) idx.push_back({j, r, s});
    for (const Cell& c : cells(spec)) {
        log << fmt::format("window alpha={} gamma={:.6g}\n", format_number(c.alpha), c.gamma);
        const auto reps = simulate_window_batch(sim_config(spec, c, {}), W, idx, spec.threads);
        res.replicates += reps.size();
        res.failed += count_failed(reps, log);
        const ModelParams ap{c.gamma, c.alpha, ag};
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::vector<SymTensor2> vals;
            for (const auto& r : reps)
                if (r.ok) vals.push_back(r.values[k].value);
            if (vals.empty()) continue;
            Rng rng = make_rng(c.seed, ~0ULL - 100 - k);
            const auto b = bootstrap(vals, spec.n_boot, rng);
            const SymTensor2 exact = mean_value_window(ap, W, idx[k].j, idx[k].r, idx[k].s);
            for (int l = 0; l <= exact.rank(); ++l) {
                const double diff = b.mean[l] - exact[l];
                const double z = b.se[l] > 0 ? diff / b.se[l] : diff == 0.0 ? 0.0 : kNaN;
                t.row(c.alpha, c.phi_target, c.gamma, idx[k].j, idx[k].r, idx[k].s, l, vals.size(), b.mean[l], b.se[l],
                      exact[l], z);
            }
        }
    }
}

}  // namespace

Mode parse_mode(const std::string& name) {
    static const std::pair<const char*, Mode> table[] = {{"simulate", Mode::Simulate}, {"analytic", Mode::Analytic},
                                                         {"estimate", Mode::Estimate}, {"reconstruct", Mode::Reconstruct},
                                                         {"oracle", Mode::Oracle},     {"window", Mode::Window}};
    for (const auto& [n, m] : table)
        if (name == n) return m;
    throw ConfigError("unknown mode \"" + name + "\"");
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Simulate: return "simulate";
        case Mode::Analytic: return "analytic";
        case Mode::Estimate: return "estimate";
        case Mode::Reconstruct: return "reconstruct";
        case Mode::Oracle: return "oracle";
        case Mode::Window: return "window";
    }
    return "?";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

BaseGrain parse_grain(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError("grain: expected an object with a \"type\"");
    const auto type = j.at("type").get<std::string>();
    BaseGrain g;
    if (type == "ellipse") {
        g = Ellipse{j.at("p").get<double>(), j.at("q").get<double>(), get_or(j, "m", 30)};
    } else if (type == "rectangle") {
        // Semi-axes p >= q, matching the ellipse convention.
        g = Rectangle::from_semi_axes(j.at("p").get<double>(), j.at("q").get<double>());
    } else if (type == "polygon") {
        std::vector<Vec2> v;
        for (const auto& pt : j.at("vertices")) v.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        try {
            g = PolygonGrain{ConvexPolygon(std::move(v))};
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("grain: ") + e.what());
        }
    } else {
        throw ConfigError("grain: unknown type \"" + type + "\"");
    }
    try {
        validate(g);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grain: ") + e.what());
    }
    return g;
}

json grain_to_json(const BaseGrain& g) {
    if (const auto* e = std::get_if<Ellipse>(&g)) return {{"type", "ellipse"}, {"p", e->p}, {"q", e->q}, {"m", e->m}};
    if (const auto* r = std::get_if<Rectangle>(&g)) return {{"type", "rectangle"}, {"p", r->a / 2}, {"q", r->b / 2}};
    json v = json::array();
    for (Vec2 p : std::get<PolygonGrain>(g).polygon.vertices()) v.push_back({p.x, p.y});
    return {{"type", "polygon"}, {"vertices", v}};
}

void ExperimentSpec::validate() const {
    const bool needs_sweep = mode != Mode::Oracle;
    if (needs_sweep && alphas.empty()) throw ConfigError("alpha sweep is empty");
    if (needs_sweep && phi_targets.empty() && gammas.empty()) throw ConfigError("need a non-empty phi or gamma sweep");
    for (double a : alphas)
        if (std::isnan(a) || a < 0) throw ConfigError("alpha values must be >= 0");
    for (double p : phi_targets)
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("phi targets must lie in (0, 1)");
    for (double g : gammas)
        if (!(g > 0.0)) throw ConfigError("gamma values must be positive");
    if (!(L > 0.0)) throw ConfigError("L must be positive");
    if (n_reps < 1) throw ConfigError("reps must be >= 1");
    if (n_boot < 100) throw ConfigError("n_boot must be >= 100");
    if (analytics != "polygon" && analytics != "exact") throw ConfigError("analytics must be \"polygon\" or \"exact\"");
    for (const auto& a : estimate_analytics)
        if (a != "polygon" && a != "exact") throw ConfigError("estimate_analytics entries must be \"polygon\" or \"exact\"");
    if (estimate_analytics.empty()) throw ConfigError("estimate_analytics is empty");
    if (histogram_bins < 1) throw ConfigError("histogram_bins must be positive");
    if (fourier_order < 0 || fourier_order > 60) throw ConfigError("fourier_order must lie in [0, 60]");
    if (grid_points < 1) throw ConfigError("grid_points must be positive");
    if (source != "analytic" && source != "simulation") throw ConfigError("source must be \"analytic\" or \"simulation\"");
    if (oracle_pairs < 1 || !(oracle_h > 0.0)) throw ConfigError("oracle settings must be positive");
    if (!(window_side_factor > 0.0)) throw ConfigError("window_side_factor must be positive");
    if (out.empty()) throw ConfigError("output path is empty");
    if (mode != Mode::Analytic && mode != Mode::Oracle && !(mode == Mode::Reconstruct && source == "analytic")) {
        const double diam = discretize(grain).diameter();
        if (diam >= L) throw ConfigError("grain diameter must be below L");
        if (mode == Mode::Window && window_side_factor * diam + 2 * diam >= L)
            throw ConfigError("window plus a grain-diameter margin must fit inside L");
    }
}

ExperimentSpec parse_spec(const json& doc) {
    if (!doc.is_object()) throw ConfigError("spec must be a JSON object");
    static const std::set<std::string> known{"mode", "grain", "alpha", "phi", "gamma", "L", "reps", "seed", "n_boot",
                                             "threads", "analytics", "estimate_analytics", "symmetrized_alpha",
                                             "histogram_bins", "fourier_order", "grid_points", "source", "oracle_pairs",
                                             "oracle_h", "window_side_factor", "window_indices", "out", "comment", "name"};
    for (const auto& [k, v] : doc.items())
        if (!known.count(k)) throw ConfigError("unknown key \"" + k + "\"");
    ExperimentSpec s;
    try {
        if (doc.contains("mode")) s.mode = parse_mode(doc.at("mode").get<std::string>());
        s.grain = doc.contains("grain") ? parse_grain(doc.at("grain")) : BaseGrain{Ellipse{}};
        if (doc.contains("alpha")) {
            const auto& a = doc.at("alpha");
            if (a.is_array())
                for (const auto& v : a) s.alphas.push_back(parse_alpha(v));
            else
                s.alphas.push_back(parse_alpha(a));
        }
        if (doc.contains("phi")) {
            const auto& p = doc.at("phi");
            if (p.is_object()) {
                const double lo = p.at("from").get<double>(), hi = p.at("to").get<double>();
                const int n = p.at("count").get<int>();
                if (n < 1) throw ConfigError("phi grid count must be positive");
                for (int i = 0; i < n; ++i)
                    s.phi_targets.push_back(i == 0 ? lo : i == n - 1 ? hi : (lo * (n - 1 - i) + hi * i) / (n - 1));
            } else if (p.is_array()) {
                s.phi_targets = p.get<std::vector<double>>();
            } else {
                s.phi_targets.push_back(p.get<double>());
            }
        }
        if (doc.contains("gamma")) {
            const auto& g = doc.at("gamma");
            s.gammas = g.is_array() ? g.get<std::vector<double>>() : std::vector<double>{g.get<double>()};
        }
        if (!s.phi_targets.empty() && !s.gammas.empty()) throw ConfigError("give either phi or gamma, not both");
        s.L = get_or(doc, "L", s.L);
        s.n_reps = get_or(doc, "reps", s.n_reps);
        s.seed = get_or(doc, "seed", s.seed);
        s.n_boot = get_or(doc, "n_boot", s.n_boot);
        s.threads = get_or(doc, "threads", s.threads);
        s.analytics = get_or(doc, "analytics", s.analytics);
        s.estimate_analytics = get_or(doc, "estimate_analytics", s.estimate_analytics);
        s.symmetrized_alpha = get_or(doc, "symmetrized_alpha", s.symmetrized_alpha);
        s.histogram_bins = get_or(doc, "histogram_bins", s.histogram_bins);
        s.fourier_order = get_or(doc, "fourier_order", s.fourier_order);
        s.grid_points = get_or(doc, "grid_points", s.grid_points);
        s.source = get_or(doc, "source", s.source);
        s.oracle_pairs = get_or(doc, "oracle_pairs", s.oracle_pairs);
        s.oracle_h = get_or(doc, "oracle_h", s.oracle_h);
        s.window_side_factor = get_or(doc, "window_side_factor", s.window_side_factor);
        if (doc.contains("window_indices"))
            for (const auto& w : doc.at("window_indices")) {
                const WindowIndex ix{w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>()};
                if (ix.j < 0 || ix.j > 2 || ix.r < 0 || ix.r > 4 || ix.s < 0 || ix.s > 8 || (ix.j == 0 && ix.r != 0) ||
                    (ix.j == 2 && ix.s != 0))
                    throw ConfigError("window_indices: unsupported (j, r, s)");
                s.window_indices.push_back(ix);
            }
        s.out = get_or(doc, "out", "btl_" + mode_name(s.mode) + ".csv");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    return s;
}

std::vector<ExperimentSpec> expand_runs(const json& doc) {
    if (!doc.is_object() || !doc.contains("runs")) return {parse_spec(doc)};
    const json& runs = doc.at("runs");
    if (!runs.is_array() || runs.empty()) throw ConfigError("runs must be a non-empty array");
    json shared = doc;
    shared.erase("runs");
    const std::string base = get_or(shared, "out", "btl_" + get_or(shared, "mode", std::string("simulate")) + ".csv");
    std::vector<ExperimentSpec> out;
    std::set<std::string> names;
    for (const auto& r : runs) {
        if (!r.is_object() || !r.contains("name")) throw ConfigError("each run needs a \"name\"");
        if (r.contains("out") || r.contains("mode")) throw ConfigError("runs may not set \"out\" or \"mode\"");
        const auto name = r.at("name").get<std::string>();
        if (!names.insert(name).second) throw ConfigError("duplicate run name \"" + name + "\"");
        json merged = shared;
        for (const auto& [k, v] : r.items()) merged[k] = v;
        merged["out"] = derived_path(base, "_" + name);
        out.push_back(parse_spec(merged));
    }
    return out;
}

json to_json(const ExperimentSpec& s) {
    json a = json::array();
    for (double x : s.alphas) a.push_back(alpha_to_json(x));
    json w = json::array();
    for (const auto& ix : s.window_indices) w.push_back({ix.j, ix.r, ix.s});
    json doc{{"mode", mode_name(s.mode)},
             {"grain", grain_to_json(s.grain)},
             {"alpha", a},
             {"L", s.L},
             {"reps", s.n_reps},
             {"seed", s.seed},
             {"n_boot", s.n_boot},
             {"analytics", s.analytics},
             {"out", s.out}};
    if (!s.phi_targets.empty()) doc["phi"] = s.phi_targets;
    if (!s.gammas.empty()) doc["gamma"] = s.gammas;
    switch (s.mode) {
        case Mode::Estimate:
            doc["estimate_analytics"] = s.estimate_analytics;
            doc["symmetrized_alpha"] = s.symmetrized_alpha;
            doc["histogram_bins"] = s.histogram_bins;
            break;
        case Mode::Reconstruct:
            doc["fourier_order"] = s.fourier_order;
            doc["grid_points"] = s.grid_points;
            doc["source"] = s.source;
            break;
        case Mode::Oracle:
            doc["oracle_pairs"] = s.oracle_pairs;
            doc["oracle_h"] = s.oracle_h;
            break;
        case Mode::Window:
            doc["window_side_factor"] = s.window_side_factor;
            doc["window_indices"] = w;
            break;
        default:
            break;
    }
    return doc;
}

RunResult run(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const json config = to_json(spec);
    RunResult res;
    switch (spec.mode) {
        case Mode::Simulate: run_simulate(spec, config, res, log); break;
        case Mode::Analytic: run_analytic(spec, config, res, log); break;
        case Mode::Estimate: run_estimate(spec, config, res, log); break;
        case Mode::Reconstruct: run_reconstruct(spec, config, res, log); break;
        case Mode::Oracle: run_oracle(spec, config, res, log); break;
        case Mode::Window: run_window(spec, config, res, log); break;
    }
    if (res.replicates > 0 && double(res.failed) > 0.01 * double(res.replicates)) res.status = 2;
    return res;
}

ConvexPolygon random_convex_polygon(Rng& rng, int min_vertices, int max_vertices) {
    boost::random::uniform_int_distribution<int> count(min_vertices, max_vertices);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = count(rng);
    const double a = 0.3 + unit(rng), b = 0.3 + unit(rng);
    for (;;) {
        std::vector<double> t(static_cast<std::size_t>(n));
        for (double& x : t) x = 2 * pi * unit(rng);
        std::sort(t.begin(), t.end());
        std::vector<Vec2> v;
        for (double x : t) v.push_back({a * std::cos(x), b * std::sin(x)});
        try {
            const ConvexPolygon p(std::move(v));
            if (p.area() < 1e-3 * a * b) continue;
            return rotate(p, 2 * pi * unit(rng)).translated({unit(rng), unit(rng)});
        } catch (const std::invalid_argument&) {
            // Nearly coincident angles; draw again.
        }
    }
}

}  // namespace btl::experiment
