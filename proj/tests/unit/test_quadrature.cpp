#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "btl/quadrature.hpp"

namespace {

// Composite 5-point Gauss-Legendre rule, independent of the library path.
double composite_gl(double (*f)(double), double a, double b, int panels) {
    const double x[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
    const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                         0.2369268850561891};
    double sum = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double m = a + (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) sum += 0.5 * h * w[i] * f(m + 0.5 * h * x[i]);
    }
    return sum;
}

}  // namespace

TEST_CASE("smooth integrands") {
    CHECK(btl::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    const auto f = [](double x) { return std::sin(3 * x) * std::exp(-x * x); };
    CHECK(btl::integrate(f, -1.0, 2.0) == doctest::Approx(composite_gl(+[](double x) { return std::sin(3 * x) * std::exp(-x * x); }, -1.0, 2.0, 400)).epsilon(1e-12));
}

TEST_CASE("kinks at break points") {
    const double pi = std::numbers::pi;
    const std::vector<double> breaks{pi / 2, 3 * pi / 2};
    const auto f = [](double t) { return std::pow(std::abs(std::cos(t)), 0.5); };
    const double v = btl::integrate(f, 0.0, 2 * pi, breaks);
    // int_0^{2pi} |cos|^{1/2} = 4 sqrt(pi) Gamma(3/4) / Gamma(5/4)
    CHECK(v == doctest::Approx(4.0 * std::sqrt(pi) * std::tgamma(0.75) / std::tgamma(1.25) / 2.0).epsilon(1e-9));
}

TEST_CASE("reports failure with achieved error") {
    btl::QuadratureOptions opt;
    opt.max_depth = 2;
    try {
        (void)btl::integrate([](double x) { return std::sin(1.0 / (x + 1e-6)); }, 0.0, 1.0, {}, opt);
        FAIL("expected QuadratureError");
    } catch (const btl::QuadratureError& e) {
        CHECK(e.achieved() > 0.0);
    }
}
