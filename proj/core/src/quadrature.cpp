#include "btl/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>
#include <queue>
#include <vector>

namespace btl {

namespace {

struct Panel {
    double a, b, value, error, l1;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel rule(const std::function<double(double)>& f, double a, double b, int depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    double err = 0.0, l1 = 0.0;
    // max_depth = 0 evaluates the single 21-point rule; its error estimate
    // refers to the interval mapped onto [-1, 1].
    const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
    return {a, b, v, err * 0.5 * (b - a), l1, depth};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                 const QuadratureOptions& opt) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("integrate: need a <= b");
    }
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::priority_queue<Panel> heap;
    double total = 0.0, err_total = 0.0, l1_total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Panel p = rule(f, pts[i], pts[i + 1], 0);
        total += p.value;
        err_total += p.error;
        l1_total += p.l1;
        heap.push(p);
    }
    const std::size_t max_panels = std::size_t{1} << std::min(opt.max_depth, 20);
    while (!heap.empty()) {
        if (!std::isfinite(total)) throw QuadratureError("integrate: non-finite integrand", INFINITY);
        if (err_total <= std::max(opt.abs_tol, opt.rel_tol * l1_total)) return total;
        const Panel worst = heap.top();
        if (worst.depth >= 2 * opt.max_depth + 8 || heap.size() >= max_panels) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel l = rule(f, worst.a, mid, worst.depth + 1), r = rule(f, mid, worst.b, worst.depth + 1);
        total += l.value + r.value - worst.value;
        err_total += l.error + r.error - worst.error;
        l1_total += l.l1 + r.l1 - worst.l1;
        heap.push(l);
        heap.push(r);
    }
    throw QuadratureError(fmt::format("integrate: error estimate {:.3g} above tolerance after {} panels", err_total,
                                      heap.size()),
                          err_total);
}

}  // namespace btl
