#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "btl/analytic.hpp"
#include "btl/minkowski.hpp"

using namespace btl;

namespace {

constexpr double pi = std::numbers::pi;

// Oracle integrals over [0, 2pi] split at quarter periods, by tanh-sinh, which
// copes with the endpoint singularities of |cos|^alpha.
template <class F>
double ts_integral(F f, double a = 0.0, double b = 2 * pi, int panels = 4) {
    boost::math::quadrature::tanh_sinh<double> ts(12);
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
        acc += ts.integrate(f, lo, hi, 1e-13);
    }
    return acc;
}

SymTensor2 rotation_average_oracle(double gamma, double alpha, const SymTensor2& phi) {
    SymTensor2 out(phi.rank());
    for (int l = 0; l <= phi.rank(); ++l)
        out[l] = gamma * ts_integral([&](double t) { return phi.rotated(t)[l] * orientation_density(alpha, t); });
    return out;
}

// Independent evaluation of the mixed density through Fourier series: with M_k the
// cosine coefficients of M and m_k = E[cos k theta], 0V-bar = gamma^2 sum M_k m_k^2.
double rectangle_mixed_density_series(double a, double b, double alpha, double gamma) {
    double acc = 0.0, m = 1.0;
    for (int k = 0; k <= 200000; k += 2) {
        // |sin| and |cos| have coefficients 2/(pi(1-k^2)) and (-1)^{k/2} 2/(pi(1-k^2)).
        const double base = 2.0 / (pi * (1.0 - double(k) * k));
        const double Mk = (a * a + b * b) * base + 2 * a * b * ((k / 2) % 2 == 0 ? 1.0 : -1.0) * base;
        acc += (k == 0 ? 1.0 : 2.0) * Mk * m * m;
        m *= (alpha - k) / (alpha + k + 2);
        if (std::abs(m) < 1e-300) break;
    }
    return gamma * gamma * acc;
}

}  // namespace

TEST_CASE("normalization constant") {
    CHECK(normalization_c(0) == doctest::Approx(1 / (2 * pi)));
    CHECK(normalization_c(1) == doctest::Approx(0.25));
    CHECK(normalization_c(2) == doctest::Approx(1 / pi));
    CHECK_THROWS(normalization_c(kAlphaInfinity));
    CHECK_THROWS(normalization_c(-1));
    for (double a : {0.0, 0.5, 1.0, 3.0, 25.0})
        CHECK(ts_integral([&](double t) { return orientation_density(a, t); }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rotation moments against quadrature") {
    for (double a : {0.0, 0.5, 1.0, 3.0, 25.0})
        for (int s1 = 0; s1 <= 6; ++s1)
            for (int s2 = 0; s1 + s2 <= 6; ++s2)
                for (int s3 = 0; s1 + s2 + s3 <= 6; ++s3)
                    for (int s4 = 0; s1 + s2 + s3 + s4 <= 6; ++s4) {
                        const double q = ts_integral([&](double t) {
                            return std::pow(std::cos(t), s1 + s4) * std::pow(-std::sin(t), s2) * std::pow(std::sin(t), s3) *
                                   orientation_density(a, t);
                        });
                        CHECK(std::abs(rotation_moment(a, s1, s2, s3, s4) - q) < 1e-10);
                    }
    CHECK(rotation_moment(kAlphaInfinity, 2, 0, 0, 2) == 1.0);
    CHECK(rotation_moment(kAlphaInfinity, 1, 1, 0, 0) == 0.0);
}

TEST_CASE("grain analytics") {
    SUBCASE("rectangle") {
        const auto g = grain_analytics(Rectangle{2.0, 0.5}, 2);
        CHECK(g.V2 == doctest::Approx(1.0));
        CHECK(g.V1 == doctest::Approx(2.5));
        CHECK(g.phi(2).m(1, 1) == doctest::Approx(0.5 / (4 * pi)));
        CHECK(g.phi(2).m(2, 2) == doctest::Approx(2.0 / (4 * pi)));
        CHECK_FALSE(g.radius);
    }
    SUBCASE("ellipse") {
        const double p = 1.0, q = 0.5;
        const auto g = grain_analytics(Ellipse{p, q, 30}, 4);
        CHECK(g.radius(0.0) == doctest::Approx(0.25));
        CHECK(ellipse_curvature_radius(1, 1, 0.7) == doctest::Approx(1.0));
        CHECK(g.V2 == doctest::Approx(pi * p * q));
        const double k = std::sqrt(1 - q * q / (p * p));
        CHECK(g.V1 == doctest::Approx(2 * p * boost::math::ellint_2(k)).epsilon(1e-12));
        CHECK(g.phi(2).trace() == doctest::Approx(g.V1 / (4 * pi)).epsilon(1e-12));
        // Fine polygon approximation as an independent check of the boundary integrals.
        const auto fine = discretize(Ellipse{p, q, 20000});
        for (int s = 0; s <= 4; ++s) CHECK(max_abs_diff(g.phi(s), surface_tensor_polygon(fine, 0, s)) < 1e-7);
    }
}

TEST_CASE("process surface tensor density") {
    const std::vector<BaseGrain> grains{Rectangle{2.0, 0.5}, Ellipse{1.0, 0.25, 30},
                                        PolygonGrain{ConvexPolygon({{0, 0}, {1, 0}, {0.2, 0.8}})}};
    for (const auto& grain : grains) {
        const auto g = grain_analytics(grain, 6);
        for (double a : {0.0, 1.0, 3.0, 25.0})
            for (int s = 0; s <= 6; ++s)
                CHECK(max_abs_diff(density_surface_tensor_X(2.0, a, g, s), rotation_average_oracle(2.0, a, g.phi(s))) < 1e-9);
        CHECK(max_abs_diff(density_surface_tensor_X(2.0, kAlphaInfinity, g, 4), g.phi(4) * 2.0) == 0.0);
    }
    const auto g = grain_analytics(Rectangle{2.0, 0.5}, 2);
    const auto& e = g.phi(2);
    for (double a : {0.0, 0.7, 5.0}) {
        const auto t = density_surface_tensor_X(3.0, a, g, 2);
        CHECK(t.m(1, 1) == doctest::Approx(3.0 / (a + 2) * ((a + 1) * e.m(1, 1) + e.m(2, 2))));
        CHECK(t.m(2, 2) == doctest::Approx(3.0 / (a + 2) * (e.m(1, 1) + (a + 1) * e.m(2, 2))));
    }
    const auto iso = density_surface_tensor_X(3.0, 0.0, g, 2);
    CHECK(iso.m(1, 1) == doctest::Approx(1.5 * e.trace()));
    CHECK(iso.m(1, 2) == 0.0);
    const auto sq = grain_analytics(Rectangle{1.0, 1.0}, 2);
    for (double a : {0.0, 3.0, 25.0}) CHECK(density_surface_tensor_X(2.0, a, sq, 2).m(1, 1) == doctest::Approx(2.0 * sq.phi(2).m(1, 1)));
}

TEST_CASE("volume fraction and union densities") {
    CHECK(volume_fraction({std::log(15.0 / 14.0), 0.0, Rectangle{1.0, 1.0}}) == doctest::Approx(1.0 / 15));
    CHECK(volume_fraction({1.0, 0.0, Rectangle{1.0, 1.0}}) == doctest::Approx(1 - std::exp(-1.0)));
    const ModelParams params{40.0, 3.0, Ellipse{0.05, 0.0125, 30}};
    const auto g = grain_analytics(params.grain, 2);
    const double phi = volume_fraction(params);
    CHECK(max_abs_diff(surface_tensor_curve(phi, c1_coeff(params.alpha, g)), surface_tensor_density_Z(params, 2)) < 1e-14);
    CHECK(surface_tensor_density_Z({40.0, 0.0, params.grain}, 2).m(1, 2) == 0.0);
    const auto iv = intrinsic_volume_densities_Z(params);
    CHECK(iv.V2 == doctest::Approx(phi));
    CHECK(iv.V1 == doctest::Approx(4 * pi * surface_tensor_density_Z(params, 2).trace()).epsilon(1e-12));
    const auto sparse = intrinsic_volume_densities_Z({1e-6, 3.0, params.grain});
    CHECK(sparse.V0 == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(sparse.V1 == doctest::Approx(1e-6 * g.V1).epsilon(1e-6));
}

TEST_CASE("mixed functional of rotated grains") {
    // Inscribed m-gons converge like 1/m^2; one Richardson step removes that term.
    const auto e = Ellipse{1.0, 0.3, 30};
    const auto coarse = discretize(Ellipse{1.0, 0.3, 400});
    const auto fine = discretize(Ellipse{1.0, 0.3, 800});
    for (double t : {0.0, 0.4, 1.3, 2.0}) {
        const double ext = (4 * mixed_V11(rotate(fine, t), fine) - mixed_V11(rotate(coarse, t), coarse)) / 3;
        CHECK(mixed_V11_rotated(e, t) == doctest::Approx(ext).epsilon(1e-6));
    }
    CHECK(mixed_V11_rotated(Ellipse{2.0, 2.0, 30}, 0.9) == doctest::Approx(2 * pi * 4).epsilon(1e-13));
    const Rectangle r{1.5, 0.4};
    const auto poly = discretize(r);
    for (double t : {0.0, 0.8, 2.5}) CHECK(mixed_V11_rotated(r, t) == doctest::Approx(mixed_V11(rotate(poly, t), poly)));
}

TEST_CASE("mixed density") {
    SUBCASE("rectangle against Fourier series") {
        for (double a : {0.0, 0.5, 1.0, 3.0, 25.0}) {
            const double v = mixed_density_V11_X({2.0, a, Rectangle{1.0, 0.25}});
            CHECK(v == doctest::Approx(rectangle_mixed_density_series(1.0, 0.25, a, 2.0)).epsilon(1e-7));
        }
    }
    SUBCASE("rectangle and polygon paths agree") {
        for (double a : {0.0, 1.0, 3.0, 25.0}) {
            const double rect = mixed_density_V11_X({1.0, a, Rectangle{1.0, 0.25}});
            const double poly = mixed_density_V11_X({1.0, a, PolygonGrain{make_rectangle(1.0, 0.25)}});
            CHECK(rect == doctest::Approx(poly).epsilon(1e-7));
        }
    }
    SUBCASE("aligned squares") {
        CHECK(mixed_density_V11_X({3.0, kAlphaInfinity, Rectangle{1.0, 1.0}}) == doctest::Approx(18.0));
    }
    SUBCASE("disks") {
        for (double a : {0.0, 1.0, 3.0, 25.0, kAlphaInfinity}) {
            CHECK(mixed_density_V11_X({2.0, a, Ellipse{0.5, 0.5, 30}}) == doctest::Approx(4 * 2 * pi * 0.25).epsilon(1e-9));
            CHECK(c0_coeff(a, Ellipse{0.5, 0.5, 30}) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("ellipse against a Fourier series of M") {
        // Cosine coefficients of M by tanh-sinh, combined with m_k = E[cos k theta].
        const BaseGrain e = Ellipse{1.0, 0.25, 30};
        for (double a : {1.0, 3.0}) {
            double series = 0.0, m = 1.0;
            for (int k = 0; k <= 80; k += 2) {
                const double Mk = ts_integral([&](double t) { return mixed_V11_rotated(e, t) * std::cos(k * t); }, 0.0, 2 * pi, 8) / (2 * pi);
                series += (k == 0 ? 1.0 : 2.0) * Mk * m * m;
                m *= (a - k) / (a + k + 2);
            }
            CHECK(mixed_density_V11_X({1.0, a, e}) == doctest::Approx(series).epsilon(1e-6));
        }
    }
}

TEST_CASE("Euler characteristic density") {
    const ModelParams disk{5.0, 1.0, Ellipse{0.2, 0.2, 30}};
    const double phi = volume_fraction(disk);
    CHECK(euler_density_Z(disk) / disk.gamma == doctest::Approx((1 - phi) * (1 + std::log(1 - phi))).epsilon(1e-9));
    const ModelParams ell{5.0, 3.0, Ellipse{0.2, 0.05, 30}};
    const double c0 = c0_coeff(ell);
    CHECK(euler_density_Z(ell) / ell.gamma == doctest::Approx(euler_curve(volume_fraction(ell), c0)).epsilon(1e-12));
    CHECK(euler_curve(1 - std::exp(-1 / c0), c0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(euler_curve(0.0, c0) == 1.0);
}

TEST_CASE("anisotropy grows with alpha") {
    const BaseGrain e = Ellipse{1.0, 0.25, 30};
    double prev = -INFINITY;
    for (double a : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 100.0, kAlphaInfinity}) {
        const auto t = surface_tensor_density_Z({1.0, a, e}, 2);
        const double d = t.m(2, 2) - t.m(1, 1);
        CHECK(d > prev);
        prev = d;
    }
    CHECK(anisotropy_ratio({1.0, 0.0, e}) == doctest::Approx(1.0));
}

TEST_CASE("isotropic constants") {
    CHECK(isotropic_constant(2, 1, 0) == doctest::Approx(1.0));
    CHECK(isotropic_constant(2, 1, 2) == doctest::Approx(1 / (8 * pi)));
    CHECK_THROWS(isotropic_constant(2, 1, 3));
    const ModelParams params{30.0, 0.0, Rectangle{0.1, 0.02}};
    const auto t = surface_tensor_density_Z(params, 2);
    const auto expected = q_power(2) * (isotropic_constant(2, 1, 2) * intrinsic_volume_densities_Z(params).V1);
    CHECK(max_abs_diff(t, expected) < 1e-10 * t.max_abs());
}

TEST_CASE("window mean values") {
    const ModelParams params{20.0, 3.0, Rectangle{0.2, 0.05}};
    const auto W = make_rectangle(1.0, 1.0).translated({0.3, 0.1});
    const double phi = volume_fraction(params);
    CHECK(mean_value_window(params, W, 2, 0, 0)[0] == doctest::Approx(phi));
    CHECK(max_abs_diff(mean_value_window(params, W, 2, 1, 0), volume_moment_tensor(W, 1) * phi) < 1e-14);
    CHECK_THROWS(mean_value_window(params, W, 2, 0, 2));
    CHECK_THROWS(mean_value_window(params, W, 0, 1, 0));
    CHECK_THROWS(mean_value_window(params, W, 3, 0, 0));

    // Large windows approach the density.
    const double side = 200.0;
    const auto big = make_rectangle(side, side);
    const auto t = mean_value_window(params, big, 1, 0, 2) * (1.0 / (side * side));
    CHECK(max_abs_diff(t, surface_tensor_density_Z(params, 2)) < 2.0 / side * t.max_abs());

    // Sparse limit of the Euler characteristic: gamma times the area of W + (-E).
    const ModelParams sparse{1e-7, kAlphaInfinity, Rectangle{0.2, 0.05}};
    const auto E = discretize(sparse.grain);
    const double v0 = mean_value_window(sparse, W, 0, 0, 0)[0];
    CHECK(v0 / sparse.gamma == doctest::Approx(translative_oracle(W, E, 1e-3)).epsilon(2e-3));
    CHECK(mean_value_window(sparse, W, 0, 0, 1).max_abs() == 0.0);
    const auto q2 = mean_value_window(sparse, W, 0, 0, 2);
    CHECK(q2.m(1, 1) == doctest::Approx(v0 / (4 * pi)));
}

TEST_CASE("window mixed functional") {
    const auto W = make_rectangle(1.0, 0.7);
    const auto coarse = discretize(Ellipse{0.3, 0.1, 128});
    const auto fine = discretize(Ellipse{0.3, 0.1, 256});
    for (double a : {0.0, 3.0, kAlphaInfinity}) {
        const double ell = mixed_V11_window_X({2.0, a, Ellipse{0.3, 0.1, 30}}, W);
        const double ext = (4 * mixed_V11_window_X({2.0, a, PolygonGrain{fine}}, W) -
                            mixed_V11_window_X({2.0, a, PolygonGrain{coarse}}, W)) / 3;
        CHECK(ell == doctest::Approx(ext).epsilon(1e-8));
    }
    CHECK(mixed_V11_window_X({2.0, kAlphaInfinity, Rectangle{0.3, 0.1}}, W) == doctest::Approx(2.0 * mixed_V11(W, make_rectangle(0.3, 0.1))));
}

TEST_CASE("Papaya normalization") {
    CHECK(papaya_normalization(1, 0, 0, SymTensor2::scalar(3.0))[0] == doctest::Approx(3.0));
    CHECK(papaya_normalization(1, 0, 2, SymTensor2(2)).max_abs() == 0.0);
    const SymTensor2 t(2, {1.0, 2.0, 3.0});
    const double f = 2.0 * omega(3) / 2.0;
    CHECK(max_abs_diff(papaya_normalization(1, 0, 2, t) * (1.0 / f), t) < 1e-15);
    CHECK_THROWS(papaya_normalization(0, 0, 0, SymTensor2::scalar(1.0)));
}
