#include "btl/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace btl {

namespace {

using GL = boost::math::quadrature::gauss<double, 12>;  // exact for degree <= 23

template <class F>
void for_each_gl_node(F&& f) {
    // boost stores the non-negative abscissae of the symmetric rule on [-1, 1].
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        f(0.5 * (1.0 + x[i]), 0.5 * w[i]);
        if (x[i] != 0.0) f(0.5 * (1.0 - x[i]), 0.5 * w[i]);
    }
}

// int over the segment a->b of x^r dH^1 as a rank-r tensor.
SymTensor2 segment_position_moment(Vec2 a, Vec2 b, int r) {
    const double len = norm(b - a);
    if (r == 0) return SymTensor2::scalar(len);
    SymTensor2 out(r);
    for_each_gl_node([&](double t, double w) { out += SymTensor2::power(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), r) * (w * len); });
    return out;
}

void check_ranks(int r, int s) {
    if (r < 0 || s < 0) throw std::invalid_argument("tensor ranks must be non-negative");
    if (r > 10) throw std::invalid_argument("position rank above 10 is not supported");
}

struct SurfaceAccumulator {
    SurfaceAccumulator(int r, int s) : r(r), s(s), sum(r + s) { check_ranks(r, s); }

    void add(Vec2 a, Vec2 b, Vec2 n) {
        const SymTensor2 u = SymTensor2::power(n.x, n.y, s);
        sum += sym_product(segment_position_moment(a, b, r), u);
    }

    SymTensor2 result() const { return sum * (1.0 / (factorial(r) * factorial(s) * omega(1 + s))); }

    int r, s;
    SymTensor2 sum;
};

}  // namespace

SymTensor2 surface_tensor_polygon(const ConvexPolygon& p, int r, int s) {
    SurfaceAccumulator acc(r, s);
    for (std::size_t i = 0; i < p.size(); ++i) acc.add(p.vertex(i), p.vertex(i + 1), p.edge_normal(i));
    return acc.result();
}

SymTensor2 surface_tensor_segments(std::span<const BoundarySegment> segments, int r, int s) {
    SurfaceAccumulator acc(r, s);
    for (const auto& seg : segments) acc.add(seg.a, seg.b, seg.normal);
    return acc.result();
}

SymTensor2 surface_tensor_region(const PolyconvexRegion& region, int r, int s) {
    SurfaceAccumulator acc(r, s);
    for (const auto& loop : region.loops)
        for (std::size_t k = 0; k < loop.vertices.size(); ++k) acc.add(loop.at(k), loop.at(k + 1), loop.normals[k]);
    return acc.result();
}

SymTensor2 volume_moment_segments(std::span<const BoundarySegment> segments, int r) {
    check_ranks(r, 0);
    // Divergence theorem: int_A x1^l x2^{r-l} dx = oint x1^{l+1}/(l+1) x2^{r-l} dx2.
    SymTensor2 out(r);
    for (const auto& seg : segments) {
        const Vec2 d = seg.b - seg.a;
        for_each_gl_node([&](double t, double w) {
            const double x1 = seg.a.x + t * d.x, x2 = seg.a.y + t * d.y;
            for (int l = 0; l <= r; ++l) out[l] += w * d.y * std::pow(x1, l + 1) / (l + 1) * std::pow(x2, r - l);
        });
    }
    return out * (1.0 / factorial(r));
}

SymTensor2 volume_moment_tensor(const ConvexPolygon& p, int r) {
    std::vector<BoundarySegment> segs;
    segs.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) segs.push_back({p.vertex(i), p.vertex(i + 1), p.edge_normal(i)});
    return volume_moment_segments(segs, r);
}

SymTensor2 euler_point_tensor(double V0, int s) {
    if (s < 0) throw std::invalid_argument("euler_point_tensor: negative rank");
    if (s % 2 != 0) return SymTensor2(s);
    return q_power(s) * (2.0 / (factorial(s) * omega(s + 1)) * V0);
}

double mixed_V11(const ConvexPolygon& p, const ConvexPolygon& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 ni = p.edge_normal(i);
        const double li = norm(p.edge(i));
        for (std::size_t j = 0; j < q.size(); ++j) {
            const Vec2 nj = q.edge_normal(j);
            const double a = std::atan2(std::abs(cross(ni, nj)), dot(ni, nj));
            acc += li * norm(q.edge(j)) * a * std::sin(a);
        }
    }
    return acc / (2.0 * std::numbers::pi);
}

FunctionalSet measure(const PolyconvexRegion& region, std::span<const int> s_list) {
    const double area = region.window.L * region.window.L;
    FunctionalSet out;
    out.V2 = region.area / area;
    out.V1 = 0.5 * region.boundary_length() / area;
    out.V0 = euler_characteristic(region) / area;
    for (int s : s_list) out.surface.insert_or_assign(s, surface_tensor_region(region, 0, s) * (1.0 / area));
    return out;
}

FunctionalSet measure_section(const WindowSection& section, std::span<const int> s_list) {
    FunctionalSet out;
    double len = 0.0;
    for (const auto& seg : section.boundary) len += norm(seg.b - seg.a);
    out.V2 = volume_moment_segments(section.boundary, 0)[0];
    out.V1 = 0.5 * len;
    out.V0 = section.euler;
    for (int s : s_list) out.surface.insert_or_assign(s, surface_tensor_segments(section.boundary, 0, s));
    return out;
}

double translative_oracle(const ConvexPolygon& p, const ConvexPolygon& q, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("translative_oracle: grid step must be positive");
    // Separating-axis data: for every candidate axis the projection intervals of P and Q.
    struct Axis {
        Vec2 n;
        double pmin, pmax, qmin, qmax;
    };
    std::vector<Axis> axes;
    const auto project = [](const ConvexPolygon& k, Vec2 n, double& lo, double& hi) {
        lo = INFINITY;
        hi = -INFINITY;
        for (const Vec2& v : k.vertices()) {
            lo = std::min(lo, dot(n, v));
            hi = std::max(hi, dot(n, v));
        }
    };
    for (const ConvexPolygon* k : {&p, &q})
        for (std::size_t i = 0; i < k->size(); ++i) {
            Axis a{k->edge_normal(i), 0, 0, 0, 0};
            project(p, a.n, a.pmin, a.pmax);
            project(q, a.n, a.qmin, a.qmax);
            axes.push_back(a);
        }
    // The hit set is P + (-Q); bound it by its bounding box.
    double x0, x1, y0, y1, qx0, qx1, qy0, qy1;
    project(p, {1, 0}, x0, x1);
    project(p, {0, 1}, y0, y1);
    project(q, {1, 0}, qx0, qx1);
    project(q, {0, 1}, qy0, qy1);
    const double lo_x = x0 - qx1, hi_x = x1 - qx0, lo_y = y0 - qy1, hi_y = y1 - qy0;
    const long nx = static_cast<long>(std::ceil((hi_x - lo_x) / h)), ny = static_cast<long>(std::ceil((hi_y - lo_y) / h));
    const double hx = (hi_x - lo_x) / nx, hy = (hi_y - lo_y) / ny;
    long hits = 0;
    for (long i = 0; i < nx; ++i) {
        const double x = lo_x + (i + 0.5) * hx;
        for (long j = 0; j < ny; ++j) {
            const double y = lo_y + (j + 0.5) * hy;
            bool hit = true;
            for (const Axis& a : axes) {
                const double shift = a.n.x * x + a.n.y * y;
                if (a.qmin + shift > a.pmax || a.qmax + shift < a.pmin) {
                    hit = false;
                    break;
                }
            }
            hits += hit;
        }
    }
    return static_cast<double>(hits) * hx * hy;
}

}  // namespace btl
