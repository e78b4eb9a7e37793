#include "btl/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "btl/minkowski.hpp"
#include "btl/quadrature.hpp"

namespace btl {

namespace {

constexpr double pi = std::numbers::pi;

// Tolerances: grain-level boundary integrals and the nested angular integrals.
constexpr double kInnerTol = 1e-11;
constexpr double kOuterTol = 1e-9;

QuadratureOptions tol(double rel) {
    QuadratureOptions o;
    o.rel_tol = rel;
    o.abs_tol = 1e-300;
    return o;
}

double wrap_angle(double x) {
    x = std::fmod(x, 2 * pi);
    return x < 0 ? x + 2 * pi : x;
}

const std::vector<double>& quarter_breaks() {
    static const std::vector<double> b{pi / 2, pi, 3 * pi / 2};
    return b;
}

// h(x) = a sin a with a the angle between u(x) and u(0), in [0, pi].
// Fourier coefficients: h_0 = 1, h_{+-1} = -1/4, h_k = (-1)^k / (1 - k^2).
double h_coefficient(int k) {
    k = std::abs(k);
    if (k == 1) return -0.25;
    return (k % 2 == 0 ? 1.0 : -1.0) / (1.0 - double(k) * k);
}

// Cosine coefficients r_k of the ellipse curvature radius (even, pi-periodic),
// by the trapezoidal rule refined until the leading coefficients are stable.
std::vector<double> radius_coefficients(double p, double q) {
    const auto sample = [&](int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) v[j] = ellipse_curvature_radius(p, q, 2 * pi * j / n);
        return v;
    };
    const auto coefficients = [](const std::vector<double>& v, int kmax) {
        const int n = static_cast<int>(v.size());
        std::vector<double> c(static_cast<std::size_t>(kmax) + 1, 0.0);
        for (int k = 0; k <= kmax; k += 2) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += v[j] * std::cos(2 * pi * double(k) * j / n);
            c[k] = acc / n;
        }
        return c;
    };
    int n = 256;
    std::vector<double> prev = coefficients(sample(n), n / 4);
    for (;;) {
        n *= 2;
        std::vector<double> cur = coefficients(sample(n), n / 4);
        double diff = 0.0;
        for (std::size_t k = 0; k < prev.size(); ++k) diff = std::max(diff, std::abs(cur[k] - prev[k]));
        if (diff <= 1e-14 * cur[0] || n >= (1 << 15)) {
            while (cur.size() > 1 && std::abs(cur.back()) <= 1e-17 * cur[0]) cur.pop_back();
            return cur;
        }
        prev = std::move(cur);
    }
}

// M(theta) = 0V_{1,1}(rotate(E, theta), E) for an ellipse as the circular
// convolution of h with the autocorrelation of r:
// M(theta) = 2 pi sum_k h_k r_k^2 e^{ik theta}.
class EllipseMixed {
public:
    EllipseMixed(double p, double q) : r_(radius_coefficients(p, q)) {}

    double operator()(double theta) const {
        double acc = h_coefficient(0) * r_[0] * r_[0];
        for (std::size_t k = 2; k < r_.size(); k += 2) acc += 2.0 * h_coefficient(int(k)) * r_[k] * r_[k] * std::cos(k * theta);
        return 2 * pi * acc;
    }

    // (1/2pi) int h(beta - phi) r(beta - theta) dbeta = sum_k h_k r_k cos(k (theta - phi)).
    double against_edge(double theta, double phi) const {
        double acc = h_coefficient(0) * r_[0];
        for (std::size_t k = 2; k < r_.size(); k += 2) acc += 2.0 * h_coefficient(int(k)) * r_[k] * std::cos(k * (theta - phi));
        return acc;
    }

private:
    std::vector<double> r_;
};

double grain_area(const BaseGrain& grain) {
    if (const auto* e = std::get_if<Ellipse>(&grain)) return pi * e->p * e->q;
    return discretize(grain).area();
}

// Angles theta at which an edge normal of rotate(P, theta) is antiparallel to an
// edge normal of W; the mixed functional has a kink there.
std::vector<double> antiparallel_angles(const ConvexPolygon& w, const ConvexPolygon& p) {
    std::vector<double> out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Vec2 nw = w.edge_normal(i);
        for (std::size_t j = 0; j < p.size(); ++j) {
            const Vec2 np = p.edge_normal(j);
            out.push_back(wrap_angle(std::atan2(nw.y, nw.x) + pi - std::atan2(np.y, np.x)));
        }
    }
    for (double b : quarter_breaks()) out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a < 1e-13; }), out.end());
    return out;
}

// K(theta) = int_0^{2pi} |cos(theta + t)|^alpha |cos t|^alpha dt.
double orientation_kernel(double alpha, double theta) {
    if (alpha == 0.0) return 2 * pi;
    std::vector<double> breaks{pi / 2, 3 * pi / 2, wrap_angle(pi / 2 - theta), wrap_angle(3 * pi / 2 - theta)};
    return integrate([&](double t) { return std::pow(std::abs(std::cos(theta + t) * std::cos(t)), alpha); }, 0.0,
                     2 * pi, breaks, tol(kInnerTol));
}

void check_alpha(double alpha) {
    if (std::isnan(alpha) || alpha < 0.0) throw std::invalid_argument("orientation parameter must be in [0, inf]");
}

}  // namespace

void ModelParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("intensity must be positive and finite");
    check_alpha(alpha);
    btl::validate(grain);
}

const SymTensor2& GrainAnalytics::phi(int s) const {
    if (s < 0 || s > s_max()) throw std::out_of_range("GrainAnalytics: tensor rank not computed");
    return surface[static_cast<std::size_t>(s)];
}

double normalization_c(double alpha) {
    check_alpha(alpha);
    if (std::isinf(alpha)) throw std::invalid_argument("normalization_c: undefined for aligned grains");
    return std::exp(std::lgamma(1.0 + alpha / 2) - std::lgamma((alpha + 1.0) / 2)) / (2.0 * std::sqrt(pi));
}

double orientation_density(double alpha, double theta) {
    return normalization_c(alpha) * std::pow(std::abs(std::cos(theta)), alpha);
}

double rotation_moment(double alpha, int s1, int s2, int s3, int s4) {
    check_alpha(alpha);
    if (std::min({s1, s2, s3, s4}) < 0) throw std::invalid_argument("rotation_moment: negative exponent");
    const int even = s1 + s4, odd = s2 + s3;
    if (even % 2 != 0 || odd % 2 != 0) return 0.0;
    if (std::isinf(alpha)) return odd == 0 ? 1.0 : 0.0;
    double v = s2 % 2 == 0 ? 1.0 : -1.0;
    for (int m = 1; m <= odd / 2; ++m) v *= 2.0 * m - 1.0;
    for (int m = 1; m <= even / 2; ++m) v *= alpha + 2.0 * m - 1.0;
    for (int m = 1; m <= (even + odd) / 2; ++m) v /= alpha + 2.0 * m;
    return v;
}

double ellipse_curvature_radius(double p, double q, double phi) {
    const double u1 = std::cos(phi), u2 = std::sin(phi);
    const double d = p * p * u1 * u1 + q * q * u2 * u2;
    return p * p * q * q / (d * std::sqrt(d));
}

GrainAnalytics grain_analytics(const BaseGrain& grain, int s_max) {
    validate(grain);
    if (s_max < 0) throw std::invalid_argument("grain_analytics: s_max must be non-negative");
    GrainAnalytics g;
    if (const auto* e = std::get_if<Ellipse>(&grain)) {
        const double p = e->p, q = e->q;
        g.radius = [p, q](double phi) { return ellipse_curvature_radius(p, q, phi); };
        g.V2 = pi * p * q;
        // Parametrized by x(t) = (p cos t, q sin t) with outer normal n(t) = (q cos t, p sin t),
        // int u^s ds = int n^s |n|^{1-s} dt is a smooth periodic integral, so the trapezoidal
        // rule converges geometrically (and is exact for disks up to rounding).
        const auto boundary_moments = [&](int n) {
            std::vector<std::vector<double>> m(s_max + 1);
            for (int s = 0; s <= s_max; ++s) m[s].assign(s + 1, 0.0);
            std::vector<double> px(s_max + 1), py(s_max + 1);
            for (int k = 0; k < n; ++k) {
                const double t = 2 * pi * k / n;
                const double nx = q * std::cos(t), ny = p * std::sin(t), len = std::hypot(nx, ny);
                px[0] = py[0] = 1.0;
                for (int i = 1; i <= s_max; ++i) {
                    px[i] = px[i - 1] * nx / len;
                    py[i] = py[i - 1] * ny / len;
                }
                for (int s = 0; s <= s_max; ++s)
                    for (int l = 0; l <= s; ++l) m[s][l] += px[l] * py[s - l] * len;
            }
            for (auto& row : m)
                for (double& v : row) v *= 2 * pi / n;
            return m;
        };
        auto moments = boundary_moments(64);
        for (int n = 128; n <= (1 << 16); n *= 2) {
            auto finer = boundary_moments(n);
            double diff = 0.0;
            for (int s = 0; s <= s_max; ++s)
                for (int l = 0; l <= s; ++l) diff = std::max(diff, std::abs(finer[s][l] - moments[s][l]));
            moments = std::move(finer);
            if (diff <= 1e-14 * moments[0][0]) break;
        }
        for (int s = 0; s <= s_max; ++s)
            g.surface.push_back(SymTensor2(s, moments[s]) * (1.0 / (factorial(s) * omega(1 + s))));
        g.V1 = g.surface[0][0];
        return g;
    }
    const ConvexPolygon poly = discretize(grain);
    g.V2 = poly.area();
    g.V1 = 0.5 * poly.perimeter();
    for (int s = 0; s <= s_max; ++s) g.surface.push_back(surface_tensor_polygon(poly, 0, s));
    return g;
}

SymTensor2 density_surface_tensor_X(double gamma, double alpha, const GrainAnalytics& g, int s) {
    check_alpha(alpha);
    const SymTensor2& phi = g.phi(s);
    if (std::isinf(alpha)) return phi * gamma;
    SymTensor2 out(s);
    if (s % 2 != 0) return out;
    // The alternating sum cancels heavily at high rank; accumulate in extended precision.
    using wide = long double;
    wide denom = 1.0L;
    for (int m = 1; m <= s / 2; ++m) denom *= alpha + 2.0L * m;
    for (int l = 0; l <= s; ++l) {
        wide acc = 0.0L;
        for (int j = (l % 2); j <= s; j += 2) {
            for (int k = std::max(0, j - s + l); k <= std::min(j, l); ++k) {
                wide term = ((l - k) % 2 == 0 ? 1.0L : -1.0L) * binomial(l, k) * binomial(s - l, j - k);
                for (int m = 1; m <= (l + j - 2 * k) / 2; ++m) term *= 2.0L * m - 1.0L;
                for (int m = 1; m <= (s - l - j + 2 * k) / 2; ++m) term *= alpha + 2.0L * m - 1.0L;
                acc += term * phi[j];
            }
        }
        out[l] = static_cast<double>(gamma * acc / denom);
    }
    return out;
}

SymTensor2 density_surface_tensor_X(const ModelParams& params, int s) {
    params.validate();
    return density_surface_tensor_X(params.gamma, params.alpha, grain_analytics(params.grain, s), s);
}

double volume_fraction(const ModelParams& params) {
    params.validate();
    return -std::expm1(-params.gamma * grain_area(params.grain));
}

SymTensor2 surface_tensor_density_Z(const ModelParams& params, int s) {
    params.validate();
    const GrainAnalytics g = grain_analytics(params.grain, s);
    return density_surface_tensor_X(params.gamma, params.alpha, g, s) * std::exp(-params.gamma * g.V2);
}

SymTensor2 c1_coeff(double alpha, const GrainAnalytics& g) {
    return density_surface_tensor_X(1.0, alpha, g, 2) * (1.0 / g.V2);
}

SymTensor2 surface_tensor_curve(double phi, const SymTensor2& c1) {
    if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("surface_tensor_curve: phi must be in [0, 1)");
    return c1 * ((phi - 1.0) * std::log1p(-phi));
}

double mixed_V11_rotated(const BaseGrain& grain, double theta) {
    validate(grain);
    if (const auto* r = std::get_if<Rectangle>(&grain))
        return (r->a * r->a + r->b * r->b) * std::abs(std::sin(theta)) + 2 * r->a * r->b * std::abs(std::cos(theta));
    if (const auto* e = std::get_if<Ellipse>(&grain)) {
        thread_local double last_p = 0.0, last_q = 0.0;
        thread_local std::optional<EllipseMixed> last;
        if (!last || last_p != e->p || last_q != e->q) {
            last.emplace(e->p, e->q);
            last_p = e->p;
            last_q = e->q;
        }
        return (*last)(theta);
    }
    const ConvexPolygon p = discretize(grain);
    return mixed_V11(rotate(p, theta), p);
}

double mixed_density_V11_X(const ModelParams& params) {
    params.validate();
    const double g2 = params.gamma * params.gamma;
    const double alpha = params.alpha;

    std::function<double(double)> M;
    std::vector<double> breaks;
    // Ellipses and rectangles have M(theta) = M(-theta) = M(theta + pi); the
    // kernel shares both symmetries, so one quarter period suffices.
    bool quarter = true;
    if (const auto* e = std::get_if<Ellipse>(&params.grain)) {
        M = [em = EllipseMixed(e->p, e->q)](double t) { return em(t); };
    } else if (std::holds_alternative<Rectangle>(params.grain)) {
        M = [grain = params.grain](double t) { return mixed_V11_rotated(grain, t); };
    } else {
        quarter = false;
        const ConvexPolygon p = discretize(params.grain);
        M = [p](double t) { return mixed_V11(rotate(p, t), p); };
        breaks = antiparallel_angles(p, p);
    }
    if (std::isinf(alpha)) return g2 * M(0.0);

    const double c = normalization_c(alpha);
    const auto integrand = [&](double t) { return M(t) * orientation_kernel(alpha, t); };
    double v;
    if (quarter)
        v = 4.0 * integrate(integrand, 0.0, pi / 2, {}, tol(kOuterTol));
    else
        v = integrate(integrand, 0.0, 2 * pi, breaks, tol(kOuterTol));
    return g2 * c * c * v;
}

double c0_coeff(double alpha, const BaseGrain& grain) {
    const ModelParams unit{1.0, alpha, grain};
    return mixed_density_V11_X(unit) / (2.0 * grain_area(grain));
}

double c0_coeff(const ModelParams& params) { return c0_coeff(params.alpha, params.grain); }

double euler_density_Z(const ModelParams& params) {
    const double mixed = mixed_density_V11_X(params);
    return std::exp(-params.gamma * grain_area(params.grain)) * (params.gamma - 0.5 * mixed);
}

double euler_curve(double phi, double c0) {
    if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("euler_curve: phi must be in [0, 1)");
    return (1.0 - phi) * (1.0 + c0 * std::log1p(-phi));
}

IntrinsicDensities intrinsic_volume_densities_Z(const ModelParams& params) {
    params.validate();
    const GrainAnalytics g = grain_analytics(params.grain, 0);
    const double survive = std::exp(-params.gamma * g.V2);
    return {euler_density_Z(params), survive * params.gamma * g.V1, -std::expm1(-params.gamma * g.V2)};
}

double anisotropy_ratio(const ModelParams& params) {
    const SymTensor2 t = density_surface_tensor_X(params, 2);
    return t.m(1, 1) / t.m(2, 2);
}

double isotropic_constant(int n, int j, int s) {
    if (n < 1 || j < 0 || j > n - 1) throw std::invalid_argument("isotropic_constant: need 0 <= j <= n-1");
    if (s < 0 || s % 2 != 0) throw std::invalid_argument("isotropic_constant: s must be even and non-negative");
    const double lead = 1.0 / (std::pow(4 * pi, s / 2) * factorial(s / 2));
    return lead * std::exp(std::lgamma((n - j + s) / 2.0) + std::lgamma(n / 2.0) - std::lgamma((n + s) / 2.0) -
                           std::lgamma((n - j) / 2.0));
}

double mixed_V11_window_X(const ModelParams& params, const ConvexPolygon& window) {
    params.validate();
    std::function<double(double)> V;
    std::vector<double> breaks(quarter_breaks());
    if (const auto* e = std::get_if<Ellipse>(&params.grain)) {
        EllipseMixed em(e->p, e->q);
        std::vector<std::pair<double, double>> edges;  // (length, normal angle)
        for (std::size_t i = 0; i < window.size(); ++i) {
            const Vec2 n = window.edge_normal(i);
            edges.emplace_back(norm(window.edge(i)), std::atan2(n.y, n.x));
        }
        V = [em, edges](double t) {
            double acc = 0.0;
            for (const auto& [len, phi] : edges) acc += len * em.against_edge(t, phi);
            return acc;
        };
    } else {
        const ConvexPolygon p = discretize(params.grain);
        V = [p, window](double t) { return mixed_V11(window, rotate(p, t)); };
        breaks = antiparallel_angles(window, p);
    }
    if (params.aligned()) return params.gamma * V(0.0);
    const double alpha = params.alpha;
    const double v = integrate([&](double t) { return V(t) * orientation_density(alpha, t); }, 0.0, 2 * pi, breaks,
                               tol(kOuterTol));
    return params.gamma * v;
}

SymTensor2 mean_value_window(const ModelParams& params, const ConvexPolygon& window, int j, int r, int s) {
    params.validate();
    if (r < 0 || r > 4 || s < 0 || s > 8) throw std::invalid_argument("mean_value_window: need 0 <= r <= 4, 0 <= s <= 8");
    const double phi = volume_fraction(params);
    const double survive = 1.0 - phi;
    switch (j) {
        case 2:
            if (s != 0) throw std::invalid_argument("mean_value_window: j = 2 requires s = 0");
            return volume_moment_tensor(window, r) * phi;
        case 1: {
            const SymTensor2 dens = density_surface_tensor_X(params, s);
            return surface_tensor_polygon(window, r, s) * phi + sym_product(volume_moment_tensor(window, r), dens) * survive;
        }
        case 0: {
            if (r != 0) throw std::invalid_argument("mean_value_window: j = 0 requires r = 0");
            const SymTensor2 q = euler_point_tensor(1.0, s);
            if (s % 2 != 0) return q;
            const double mixed_wx = mixed_V11_window_X(params, window);
            const double mixed_xx = mixed_density_V11_X(params);
            return q * (phi + survive * (mixed_wx + window.area() * (params.gamma - 0.5 * mixed_xx)));
        }
        default:
            throw std::invalid_argument("mean_value_window: j must be 0, 1 or 2");
    }
}

SymTensor2 papaya_normalization(int j, int r, int s, const SymTensor2& phi_2_minus_j) {
    if (j < 1 || j > 2) throw std::invalid_argument("papaya_normalization: need 0 < j <= 2");
    if (r < 0 || s < 0 || phi_2_minus_j.rank() != r + s)
        throw std::invalid_argument("papaya_normalization: tensor rank must equal r + s");
    // n C(n-1, j-1) = 2 for n = 2 and j in {1, 2}.
    return phi_2_minus_j * (factorial(r) * factorial(s) * omega(j + s) / 2.0);
}

}  // namespace btl
