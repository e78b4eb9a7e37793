#include "btl/geom2d.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace btl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative tolerances, scaled by the domain side L inside torus_union.
constexpr double kSnapRel = 1e-12;     // collinearity of edges
constexpr double kJoinRel = 1e-9;      // endpoint matching when closing loops
constexpr double kParallelRel = 1e-12; // |n . d| / |d| below this counts as parallel

double polygon_area(std::span<const Vec2> v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * a;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw std::invalid_argument("ConvexPolygon: need at least 3 vertices");
    for (const Vec2& v : vertices_)
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw std::invalid_argument("ConvexPolygon: non-finite vertex");
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = edge(i), e1 = edge(i + 1);
        const double l0 = norm(e0), l1 = norm(e1);
        if (l0 == 0.0) throw std::invalid_argument("ConvexPolygon: repeated vertex");
        if (cross(e0, e1) <= 1e-12 * l0 * l1)
            throw std::invalid_argument("ConvexPolygon: vertices must form a strictly convex counterclockwise loop");
    }
    // A strictly convex turn at every vertex can still wind around more than once.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += turn_angle(edge(i), edge(i + 1));
    if (std::abs(total - kTwoPi) > 1e-6) throw std::invalid_argument("ConvexPolygon: boundary winds more than once");
}

double ConvexPolygon::area() const { return polygon_area(vertices_); }

double ConvexPolygon::perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0; i < size(); ++i) p += norm(edge(i));
    return p;
}

double ConvexPolygon::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, norm(vertices_[i] - vertices_[j]));
    return d;
}

double ConvexPolygon::circumradius() const {
    // Incremental minimal enclosing circle.
    const auto& pts = vertices_;
    const auto inside = [](Vec2 c, double r, Vec2 p) { return norm(p - c) <= r * (1.0 + 1e-12) + 1e-300; };
    Vec2 c = pts[0];
    double r = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (inside(c, r, pts[i])) continue;
        c = pts[i];
        r = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            if (inside(c, r, pts[j])) continue;
            c = 0.5 * (pts[i] + pts[j]);
            r = 0.5 * norm(pts[i] - pts[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (inside(c, r, pts[k])) continue;
                const Vec2 a = pts[i], b = pts[j], d = pts[k];
                const Vec2 ab = b - a, ad = d - a;
                const double den = 2.0 * cross(ab, ad);
                const double ab2 = dot(ab, ab), ad2 = dot(ad, ad);
                const Vec2 off{(ad.y * ab2 - ab.y * ad2) / den, (ab.x * ad2 - ad.x * ab2) / den};
                c = a + off;
                r = norm(off);
            }
        }
    }
    return r;
}

bool ConvexPolygon::contains(Vec2 p) const {
    for (std::size_t i = 0; i < size(); ++i)
        if (cross(edge(i), p - vertex(i)) < 0.0) return false;
    return true;
}

ConvexPolygon ConvexPolygon::translated(Vec2 v) const {
    std::vector<Vec2> out(vertices_);
    for (Vec2& p : out) p += v;
    return ConvexPolygon(std::move(out), Unchecked{});
}

ConvexPolygon rotate(const ConvexPolygon& p, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<Vec2> out;
    out.reserve(p.size());
    for (const Vec2& v : p.vertices()) out.push_back({c * v.x - s * v.y, s * v.x + c * v.y});
    return ConvexPolygon(std::move(out), ConvexPolygon::Unchecked{});
}

ConvexPolygon make_rectangle(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("make_rectangle: side lengths must be positive");
    return ConvexPolygon({{a / 2, -b / 2}, {a / 2, b / 2}, {-a / 2, b / 2}, {-a / 2, -b / 2}});
}

void validate(const BaseGrain& grain) {
    std::visit(
        [](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                if (!(g.q > 0.0) || !(g.p >= g.q)) throw std::invalid_argument("Ellipse: need p >= q > 0");
                if (g.m < 8) throw std::invalid_argument("Ellipse: need at least 8 vertices");
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                if (!(g.a > 0.0) || !(g.b > 0.0)) throw std::invalid_argument("Rectangle: need a, b > 0");
            } else {
                if (g.polygon.size() < 3) throw std::invalid_argument("Polygon grain: empty polygon");
            }
        },
        grain);
}

std::string describe(const BaseGrain& grain) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>)
                os << "ellipse(p=" << g.p << ",q=" << g.q << ",m=" << g.m << ")";
            else if constexpr (std::is_same_v<T, Rectangle>)
                os << "rectangle(a=" << g.a << ",b=" << g.b << ")";
            else
                os << "polygon(n=" << g.polygon.size() << ")";
        },
        grain);
    return os.str();
}

ConvexPolygon discretize(const BaseGrain& grain) {
    validate(grain);
    return std::visit(
        [](const auto& g) -> ConvexPolygon {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                std::vector<Vec2> v;
                v.reserve(static_cast<std::size_t>(g.m));
                for (int k = 0; k < g.m; ++k) {
                    const double phi = kTwoPi * k / g.m;
                    v.push_back({g.p * std::cos(phi), g.q * std::sin(phi)});
                }
                return ConvexPolygon(std::move(v));
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                return make_rectangle(g.a, g.b);
            } else {
                return g.polygon;
            }
        },
        grain);
}

std::optional<ConvexPolygon> convex_intersect(const ConvexPolygon& p, const ConvexPolygon& q) {
    // Sutherland-Hodgman: clip p by every half-plane of q.
    std::vector<Vec2> poly(p.vertices().begin(), p.vertices().end());
    const double scale = std::max(p.diameter(), q.diameter());
    for (std::size_t i = 0; i < q.size() && !poly.empty(); ++i) {
        const Vec2 a = q.vertex(i), e = q.edge(i);
        const double len = norm(e);
        std::vector<Vec2> out;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Vec2 s = poly[k], t = poly[(k + 1) % poly.size()];
            const double ds = cross(e, s - a) / len, dt = cross(e, t - a) / len;
            if (ds >= 0.0) out.push_back(s);
            if ((ds >= 0.0) != (dt >= 0.0)) out.push_back(s + (ds / (ds - dt)) * (t - s));
        }
        poly = std::move(out);
    }
    // Drop near-duplicate and collinear vertices so the result is strictly convex.
    const double eps = 1e-12 * scale;
    std::vector<Vec2> clean;
    for (const Vec2& v : poly)
        if (clean.empty() || norm(v - clean.back()) > eps) clean.push_back(v);
    while (clean.size() > 1 && norm(clean.front() - clean.back()) <= eps) clean.pop_back();
    bool changed = true;
    while (changed && clean.size() >= 3) {
        changed = false;
        for (std::size_t k = 0; k < clean.size(); ++k) {
            const Vec2 a = clean[(k + clean.size() - 1) % clean.size()], b = clean[k], c = clean[(k + 1) % clean.size()];
            if (cross(b - a, c - b) <= 1e-12 * norm(b - a) * norm(c - b)) {
                clean.erase(clean.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
                break;
            }
        }
    }
    if (clean.size() < 3 || polygon_area(clean) <= eps * scale) return std::nullopt;
    return ConvexPolygon(std::move(clean));
}

bool intersects(const ConvexPolygon& p, const ConvexPolygon& q) {
    const auto separated_along = [](const ConvexPolygon& a, const ConvexPolygon& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const Vec2 n = a.edge_normal(i);
            const double amax = dot(n, a.vertex(i));
            double bmin = INFINITY;
            for (const Vec2& v : b.vertices()) bmin = std::min(bmin, dot(n, v));
            if (bmin > amax) return true;
        }
        return false;
    };
    return !separated_along(p, q) && !separated_along(q, p);
}

double BoundaryLoop::length() const {
    double l = 0.0;
    for (std::size_t k = 0; k < vertices.size(); ++k) l += norm(at(k + 1) - at(k));
    return l;
}

double PolyconvexRegion::boundary_length() const {
    double l = 0.0;
    for (const auto& loop : loops) l += loop.length();
    return l;
}

bool PolyconvexRegion::contains(Vec2 p) const {
    const double L = window.L;
    const Vec2 w{p.x - std::floor(p.x / L) * L, p.y - std::floor(p.y / L) * L};
    for (const auto& g : grains)
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy)
                if (g.contains(w + Vec2{sx * L, sy * L})) return true;
    return false;
}

namespace {

struct Prepared {
    std::vector<Vec2> v;
    std::vector<Vec2> n;    // outer unit normals
    std::vector<double> c;  // n[k] . x <= c[k] inside
    Vec2 lo, hi;
};

Prepared prepare(const ConvexPolygon& p) {
    Prepared out;
    out.v.assign(p.vertices().begin(), p.vertices().end());
    out.lo = out.hi = out.v[0];
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Vec2 nk = p.edge_normal(k);
        out.n.push_back(nk);
        out.c.push_back(dot(nk, p.vertex(k)));
        out.lo = {std::min(out.lo.x, out.v[k].x), std::min(out.lo.y, out.v[k].y)};
        out.hi = {std::max(out.hi.x, out.v[k].x), std::max(out.hi.y, out.v[k].y)};
    }
    return out;
}

struct Interval {
    double t0;
    double t1;
};

// Part of the segment p0 + t d, t in [0, 1], lying in the interior of polygon B
// translated by `shift`. An edge of B collinear with the segment covers it when
// the normals are opposite, or when they agree and B has priority.
std::optional<Interval> covered_by(const Prepared& B, Vec2 shift, Vec2 p0, Vec2 d, Vec2 seg_normal,
                                   bool b_has_priority, double snap) {
    const double dlen = norm(d);
    double enter = 0.0, exit = 1.0;
    for (std::size_t k = 0; k < B.n.size(); ++k) {
        const Vec2 nk = B.n[k];
        const double g0 = dot(nk, p0) - (B.c[k] + dot(nk, shift));
        const double h = dot(nk, d);
        if (std::abs(h) <= kParallelRel * dlen) {
            if (g0 > snap) return std::nullopt;
            if (g0 >= -snap) {
                const bool same = dot(nk, seg_normal) > 0.0;
                if (same && !b_has_priority) return std::nullopt;
            }
            continue;
        }
        const double t = -g0 / h;
        if (h > 0.0)
            exit = std::min(exit, t);
        else
            enter = std::max(enter, t);
        if (exit <= enter) return std::nullopt;
    }
    if (exit - enter <= snap / dlen) return std::nullopt;
    return Interval{enter, exit};
}

// Complement of the union of `covered` inside [0, 1].
std::vector<Interval> uncovered(std::vector<Interval>& covered, double min_len) {
    std::sort(covered.begin(), covered.end(), [](const Interval& a, const Interval& b) { return a.t0 < b.t0; });
    std::vector<Interval> free;
    double cursor = 0.0;
    for (const Interval& iv : covered) {
        if (iv.t0 > cursor + min_len) free.push_back({cursor, iv.t0});
        cursor = std::max(cursor, iv.t1);
    }
    if (cursor < 1.0 - min_len) free.push_back({cursor, 1.0});
    return free;
}

struct Piece {
    Vec2 a;
    Vec2 b;
    Vec2 normal;
};

struct Coverer {
    std::size_t grain;
    Vec2 shift;
};

bool boxes_overlap(Vec2 alo, Vec2 ahi, Vec2 blo, Vec2 bhi, double pad) {
    return alo.x <= bhi.x + pad && blo.x <= ahi.x + pad && alo.y <= bhi.y + pad && blo.y <= ahi.y + pad;
}

Vec2 wrap(Vec2 p, double L) { return {p.x - std::floor(p.x / L) * L, p.y - std::floor(p.y / L) * L}; }

double torus_distance(Vec2 a, Vec2 b, double L) {
    Vec2 d = a - b;
    d.x -= L * std::round(d.x / L);
    d.y -= L * std::round(d.y / L);
    return norm(d);
}

// Uniform bucket grid over the torus keyed by bounding-box centres.
class GrainGrid {
public:
    GrainGrid(std::span<const Prepared> grains, double L, double max_extent) : L_(L) {
        cells_ = std::max(1, static_cast<int>(std::floor(L / std::max(max_extent, 1e-300))));
        cells_ = std::min(cells_, 4096);
        buckets_.resize(static_cast<std::size_t>(cells_) * cells_);
        for (std::size_t i = 0; i < grains.size(); ++i) {
            const auto [cx, cy] = cell_of(0.5 * (grains[i].lo + grains[i].hi));
            buckets_[static_cast<std::size_t>(cx) * cells_ + cy].push_back(i);
        }
    }

    template <class F>
    void for_each_near(Vec2 centre, F&& f) const {
        const auto [cx, cy] = cell_of(centre);
        std::vector<int> xs, ys;
        for (int d = -1; d <= 1; ++d) {
            xs.push_back(((cx + d) % cells_ + cells_) % cells_);
            ys.push_back(((cy + d) % cells_ + cells_) % cells_);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        for (int x : xs)
            for (int y : ys)
                for (std::size_t j : buckets_[static_cast<std::size_t>(x) * cells_ + y]) f(j);
    }

private:
    std::pair<int, int> cell_of(Vec2 p) const {
        const Vec2 w = wrap(p, L_);
        const int cx = std::min(cells_ - 1, static_cast<int>(w.x / L_ * cells_));
        const int cy = std::min(cells_ - 1, static_cast<int>(w.y / L_ * cells_));
        return {cx, cy};
    }

    double L_;
    int cells_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

// Hash of piece start points on the torus for loop closing.
class StartIndex {
public:
    StartIndex(double L, double tol) : L_(L), tol_(tol) {
        cells_ = static_cast<std::int64_t>(std::max(1.0, std::floor(L / (4.0 * tol))));
    }

    void insert(Vec2 p, std::size_t id) { map_.emplace(key(cell(p)), id); }

    template <class F>
    void for_each_near(Vec2 p, F&& f) const {
        const auto [cx, cy] = cell(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto [lo, hi] = map_.equal_range(key({mod(cx + dx), mod(cy + dy)}));
                for (auto it = lo; it != hi; ++it) f(it->second);
            }
    }

private:
    std::int64_t mod(std::int64_t v) const { return ((v % cells_) + cells_) % cells_; }
    std::pair<std::int64_t, std::int64_t> cell(Vec2 p) const {
        const Vec2 w = wrap(p, L_);
        return {mod(static_cast<std::int64_t>(w.x / L_ * static_cast<double>(cells_))),
                mod(static_cast<std::int64_t>(w.y / L_ * static_cast<double>(cells_)))};
    }
    std::uint64_t key(std::pair<std::int64_t, std::int64_t> c) const {
        return static_cast<std::uint64_t>(c.first) * static_cast<std::uint64_t>(cells_) + static_cast<std::uint64_t>(c.second);
    }

    double L_;
    double tol_;
    std::int64_t cells_;
    std::unordered_multimap<std::uint64_t, std::size_t> map_;
};

// Liang-Barsky clip of segment a-b against the closed box [lo, hi].
std::optional<std::pair<Vec2, Vec2>> clip_to_box(Vec2 a, Vec2 b, Vec2 lo, Vec2 hi) {
    const Vec2 d = b - a;
    double t0 = 0.0, t1 = 1.0;
    const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
    const std::array<double, 4> q{a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return std::nullopt;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t1 <= t0) return std::nullopt;
    }
    return std::pair{a + t0 * d, a + t1 * d};
}

// Parts of segment p0->p1 covered by any grain copy, returned as pieces.
std::vector<Interval> covered_parts(Vec2 p0, Vec2 p1, Vec2 seg_normal, std::span<const Prepared> grains, double L,
                                    double snap) {
    const Vec2 d = p1 - p0;
    const Vec2 lo{std::min(p0.x, p1.x), std::min(p0.y, p1.y)}, hi{std::max(p0.x, p1.x), std::max(p0.y, p1.y)};
    std::vector<Interval> cov;
    for (const Prepared& g : grains)
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy) {
                const Vec2 shift{sx * L, sy * L};
                if (!boxes_overlap(g.lo + shift, g.hi + shift, lo, hi, snap)) continue;
                if (auto iv = covered_by(g, shift, p0, d, seg_normal, false, snap)) cov.push_back(*iv);
            }
    std::sort(cov.begin(), cov.end(), [](const Interval& a, const Interval& b) { return a.t0 < b.t0; });
    std::vector<Interval> merged;
    for (const Interval& iv : cov) {
        if (!merged.empty() && iv.t0 <= merged.back().t1)
            merged.back().t1 = std::max(merged.back().t1, iv.t1);
        else
            merged.push_back(iv);
    }
    return merged;
}

}  // namespace

PolyconvexRegion torus_union(std::span<const ConvexPolygon> grains, TorusWindow window) {
    const double L = window.L;
    if (!(L > 0.0)) throw std::invalid_argument("torus_union: window side must be positive");
    const double snap = kSnapRel * L;
    const double join = kJoinRel * L;

    PolyconvexRegion region;
    region.window = window;
    region.grains.assign(grains.begin(), grains.end());

    std::vector<Prepared> prep;
    prep.reserve(grains.size());
    double max_extent = 0.0;
    for (const auto& g : grains) {
        if (g.diameter() >= L) throw std::invalid_argument("torus_union: grain does not fit in the torus window");
        prep.push_back(prepare(g));
        max_extent = std::max({max_extent, prep.back().hi.x - prep.back().lo.x, prep.back().hi.y - prep.back().lo.y});
    }
    const GrainGrid grid(prep, L, max_extent);

    // 1. Uncovered pieces of every grain edge.
    std::vector<Piece> pieces;
    std::vector<Coverer> near;
    std::vector<Interval> cov;
    for (std::size_t i = 0; i < prep.size(); ++i) {
        const Prepared& A = prep[i];
        near.clear();
        grid.for_each_near(0.5 * (A.lo + A.hi), [&](std::size_t j) {
            if (j == i) return;
            for (int sx = -1; sx <= 1; ++sx)
                for (int sy = -1; sy <= 1; ++sy) {
                    const Vec2 shift{sx * L, sy * L};
                    if (boxes_overlap(A.lo, A.hi, prep[j].lo + shift, prep[j].hi + shift, snap))
                        near.push_back({j, shift});
                }
        });
        const std::size_t m = A.v.size();
        for (std::size_t e = 0; e < m; ++e) {
            const Vec2 p0 = A.v[e], p1 = A.v[(e + 1) % m], d = p1 - p0;
            const Vec2 elo{std::min(p0.x, p1.x), std::min(p0.y, p1.y)}, ehi{std::max(p0.x, p1.x), std::max(p0.y, p1.y)};
            cov.clear();
            for (const Coverer& c : near) {
                const Prepared& B = prep[c.grain];
                if (!boxes_overlap(elo, ehi, B.lo + c.shift, B.hi + c.shift, snap)) continue;
                if (auto iv = covered_by(B, c.shift, p0, d, A.n[e], c.grain < i, snap)) cov.push_back(*iv);
            }
            const double min_t = snap / norm(d);
            for (const Interval& f : uncovered(cov, min_t)) {
                const Vec2 a = f.t0 == 0.0 ? p0 : p0 + f.t0 * d;
                const Vec2 b = f.t1 == 1.0 ? p1 : p0 + f.t1 * d;
                pieces.push_back({a, b, A.n[e]});
            }
        }
    }

    // 2. Close pieces into loops. Ends and starts that meet form junctions; at a
    // junction with several branches, an incoming piece continues with the first
    // outgoing piece counterclockwise from its reversed direction, so grains that
    // touch are joined as closed sets.
    StartIndex starts(L, join);
    for (std::size_t k = 0; k < pieces.size(); ++k) starts.insert(pieces[k].a, k);

    std::vector<std::size_t> next(pieces.size(), SIZE_MAX);
    std::vector<char> start_taken(pieces.size(), 0);
    std::vector<std::size_t> cand;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        cand.clear();
        starts.for_each_near(pieces[k].b, [&](std::size_t s) {
            if (torus_distance(pieces[s].a, pieces[k].b, L) <= join) cand.push_back(s);
        });
        if (cand.empty()) throw GeometryError("torus_union: open boundary piece, arrangement inconsistent");
        const Vec2 din = pieces[k].b - pieces[k].a;
        const double rev = std::atan2(-din.y, -din.x);
        std::size_t best = SIZE_MAX;
        double best_gap = INFINITY;
        for (std::size_t s : cand) {
            if (start_taken[s]) continue;
            const Vec2 dout = pieces[s].b - pieces[s].a;
            double gap = std::atan2(dout.y, dout.x) - rev;
            while (gap <= 0.0) gap += kTwoPi;
            while (gap > kTwoPi) gap -= kTwoPi;
            if (gap < best_gap) {
                best_gap = gap;
                best = s;
            }
        }
        if (best == SIZE_MAX) throw GeometryError("torus_union: junction has more incoming than outgoing pieces");
        next[k] = best;
        start_taken[best] = 1;
    }

    std::vector<char> used(pieces.size(), 0);
    for (std::size_t k0 = 0; k0 < pieces.size(); ++k0) {
        if (used[k0]) continue;
        BoundaryLoop loop;
        Vec2 offset{0.0, 0.0};
        Vec2 prev_end;
        std::size_t k = k0;
        bool first = true;
        while (!used[k]) {
            used[k] = 1;
            const Piece& p = pieces[k];
            if (!first) {
                const Vec2 gap = prev_end - (p.a + offset);
                offset += Vec2{L * std::round(gap.x / L), L * std::round(gap.y / L)};
            }
            loop.vertices.push_back(p.a + offset);
            loop.normals.push_back(p.normal);
            prev_end = p.b + offset;
            first = false;
            k = next[k];
        }
        if (k != k0) throw GeometryError("torus_union: boundary pieces do not form closed loops");
        const Vec2 gap = prev_end - loop.vertices[0];
        loop.wrap = {L * std::round(gap.x / L), L * std::round(gap.y / L)};
        region.loops.push_back(std::move(loop));
    }

    // 3. Area of the union inside [0, L]^2 by Green's theorem: union boundary
    // clipped to the square plus the covered parts of the square's frame.
    double twice_area = 0.0;
    const Vec2 lo{0.0, 0.0}, hi{L, L};
    for (const Piece& p : pieces)
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy) {
                const Vec2 shift{sx * L, sy * L};
                if (auto c = clip_to_box(p.a + shift, p.b + shift, lo, hi)) twice_area += cross(c->first, c->second);
            }
    const std::array<Vec2, 4> corner{Vec2{0, 0}, Vec2{L, 0}, Vec2{L, L}, Vec2{0, L}};
    for (int e = 0; e < 4; ++e) {
        const Vec2 p0 = corner[e], p1 = corner[(e + 1) % 4], d = p1 - p0;
        for (const Interval& iv : covered_parts(p0, p1, right_normal(d), prep, L, snap))
            twice_area += cross(p0 + iv.t0 * d, p0 + iv.t1 * d);
    }
    region.area = std::clamp(0.5 * twice_area, 0.0, L * L);
    return region;
}

int euler_characteristic(const PolyconvexRegion& region) {
    double total = 0.0;
    for (const auto& loop : region.loops) {
        const std::size_t n = loop.vertices.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 a = loop.at(k + n - 1), b = loop.at(k + n), c = loop.at(k + n + 1);
            total += turn_angle(b - a, c - b);
        }
    }
    const double chi = total / kTwoPi;
    const double rounded = std::round(chi);
    if (std::abs(chi - rounded) > 1e-6) throw GeometryError("euler_characteristic: turning angles do not sum to a multiple of 2 pi");
    return static_cast<int>(rounded);
}

WindowSection section_with_window(const PolyconvexRegion& region, const ConvexPolygon& window) {
    const double L = region.window.L;
    const double snap = kSnapRel * L;
    const Prepared W = prepare(window);
    const std::size_t wm = W.v.size();

    WindowSection out;
    double turning = 0.0;

    // Union boundary inside W. Crossings of the window frame contribute the turn
    // between the boundary direction and the counterclockwise frame direction.
    for (const auto& loop : region.loops) {
        const std::size_t n = loop.vertices.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 a0 = loop.at(k), b0 = loop.at(k + 1);
            // Unwrapped loops of large clusters can extend over several periods.
            const int sx0 = static_cast<int>(std::floor((W.lo.x - std::max(a0.x, b0.x)) / L)) - 1;
            const int sx1 = static_cast<int>(std::ceil((W.hi.x - std::min(a0.x, b0.x)) / L)) + 1;
            const int sy0 = static_cast<int>(std::floor((W.lo.y - std::max(a0.y, b0.y)) / L)) - 1;
            const int sy1 = static_cast<int>(std::ceil((W.hi.y - std::min(a0.y, b0.y)) / L)) + 1;
            for (int sx = sx0; sx <= sx1; ++sx)
                for (int sy = sy0; sy <= sy1; ++sy) {
                    const Vec2 shift{sx * L, sy * L};
                    const Vec2 a = a0 + shift, b = b0 + shift, d = b - a;
                    if (!boxes_overlap({std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)},
                                       W.lo, W.hi, snap))
                        continue;
                    double enter = 0.0, exit = 1.0;
                    std::size_t enter_edge = SIZE_MAX, exit_edge = SIZE_MAX;
                    bool empty = false;
                    for (std::size_t e = 0; e < wm && !empty; ++e) {
                        const double g0 = dot(W.n[e], a) - W.c[e];
                        const double h = dot(W.n[e], d);
                        if (h == 0.0) {
                            if (g0 > 0.0) empty = true;
                            continue;
                        }
                        const double t = -g0 / h;
                        if (h > 0.0 && t < exit) {
                            exit = t;
                            exit_edge = e;
                        } else if (h < 0.0 && t > enter) {
                            enter = t;
                            enter_edge = e;
                        }
                        if (exit <= enter) empty = true;
                    }
                    if (empty) continue;
                    const Vec2 pa = a + enter * d, pb = a + exit * d;
                    out.boundary.push_back({pa, pb, loop.normals[k]});
                    if (enter_edge != SIZE_MAX) {
                        const Vec2 f = W.v[(enter_edge + 1) % wm] - W.v[enter_edge];
                        turning += turn_angle(f, d);
                    }
                    if (exit_edge != SIZE_MAX) {
                        const Vec2 f = W.v[(exit_edge + 1) % wm] - W.v[exit_edge];
                        turning += turn_angle(d, f);
                    } else {
                        // Segment ends inside W: turn at the loop vertex b0.
                        const Vec2 c = loop.at(k + 2) - b0;
                        turning += turn_angle(d, c);
                    }
                }
        }
    }

    // Frame pieces covered by the union and covered window corners.
    std::vector<Prepared> prep;
    prep.reserve(region.grains.size());
    for (const auto& g : region.grains) prep.push_back(prepare(g));
    for (std::size_t e = 0; e < wm; ++e) {
        const Vec2 p0 = W.v[e], p1 = W.v[(e + 1) % wm], d = p1 - p0;
        for (const Interval& iv : covered_parts(p0, p1, W.n[e], prep, L, snap))
            out.boundary.push_back({p0 + iv.t0 * d, p0 + iv.t1 * d, W.n[e]});
        if (region.contains(p1)) turning += turn_angle(d, W.v[(e + 2) % wm] - p1);
    }

    const double chi = turning / kTwoPi;
    const double rounded = std::round(chi);
    if (std::abs(chi - rounded) > 1e-6) throw GeometryError("section_with_window: turning angles do not close");
    out.euler = static_cast<int>(rounded);
    return out;
}

}  // namespace btl
