#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace btl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double k) { x *= k; y *= k; return *this; }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(Vec2 a, double k) { return a *= k; }
    friend Vec2 operator*(double k, Vec2 a) { return a *= k; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// u(angle) = (cos angle, sin angle).
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
/// Outer normal of an edge traversed counterclockwise around its polygon.
inline Vec2 right_normal(Vec2 d) {
    const double n = norm(d);
    return {d.y / n, -d.x / n};
}
/// Signed turning angle in (-pi, pi] from direction a to direction b.
inline double turn_angle(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Counterclockwise, strictly convex vertex loop with at least three vertices.
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    /// Validates orientation and strict convexity; throws std::invalid_argument.
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
    /// Edge i runs from vertex i to vertex i+1.
    Vec2 edge(std::size_t i) const { return vertex(i + 1) - vertex(i); }
    Vec2 edge_normal(std::size_t i) const { return right_normal(edge(i)); }

    double area() const;
    double perimeter() const;
    double diameter() const;
    /// Radius of the smallest enclosing circle.
    double circumradius() const;
    bool contains(Vec2 p) const;

    ConvexPolygon translated(Vec2 v) const;

private:
    struct Unchecked {};
    ConvexPolygon(std::vector<Vec2> vertices, Unchecked) : vertices_(std::move(vertices)) {}
    friend ConvexPolygon rotate(const ConvexPolygon& p, double theta);

    std::vector<Vec2> vertices_;
};

ConvexPolygon rotate(const ConvexPolygon& p, double theta);

/// Axis-aligned rectangle with full side lengths a (along e1) and b, centered at 0.
ConvexPolygon make_rectangle(double a, double b);

struct Ellipse {
    double p = 1.0;   ///< main semi-axis, along e1
    double q = 1.0;   ///< minor semi-axis
    int m = 30;       ///< vertex count of the inscribed polygon used in simulation
};

struct Rectangle {
    double a = 1.0;   ///< full side length along e1
    double b = 1.0;

    static Rectangle from_semi_axes(double p, double q) { return {2.0 * p, 2.0 * q}; }
};

struct PolygonGrain {
    ConvexPolygon polygon;
};

/// Base grain E of the Boolean model: main axis along e1, centered at the origin.
using BaseGrain = std::variant<Ellipse, Rectangle, PolygonGrain>;

void validate(const BaseGrain& grain);
std::string describe(const BaseGrain& grain);

/// Ellipse -> inscribed m-gon with vertices at angles 2 pi k / m; Rectangle -> 4-gon;
/// Polygon -> unchanged.
ConvexPolygon discretize(const BaseGrain& grain);

/// Nonempty intersection of two convex polygons (positive area), else nullopt.
std::optional<ConvexPolygon> convex_intersect(const ConvexPolygon& p, const ConvexPolygon& q);

/// Closed-set overlap test by separating axes.
bool intersects(const ConvexPolygon& p, const ConvexPolygon& q);

/// Square fundamental domain [0, L)^2 of a flat torus.
struct TorusWindow {
    double L = 1.0;
};

/// One closed boundary curve of a union set. Vertices are unwrapped (consecutive
/// vertices are joined by straight edges in the plane); normals[k] is the outer
/// unit normal of the edge from vertices[k] to vertices[k+1]. A loop winding
/// around the torus closes onto vertices[0] + wrap instead of vertices[0].
struct BoundaryLoop {
    std::vector<Vec2> vertices;
    std::vector<Vec2> normals;
    Vec2 wrap;

    /// Vertex k for any k >= 0, continued periodically along the loop.
    Vec2 at(std::size_t k) const {
        const std::size_t n = vertices.size();
        return vertices[k % n] + static_cast<double>(k / n) * wrap;
    }
    double length() const;
};

/// Union of convex grains on a flat torus.
struct PolyconvexRegion {
    std::vector<BoundaryLoop> loops;
    double area = 0.0;
    TorusWindow window;
    /// Grains as placed (absolute coordinates, possibly crossing the domain edge).
    std::vector<ConvexPolygon> grains;

    double boundary_length() const;
    /// Point membership in the closed union, with torus identification.
    bool contains(Vec2 p) const;
};

/// Boundary of the union of the grains on the torus. Grains crossing the domain
/// edge interact with the neighbouring periodic copies of all other grains.
/// Throws GeometryError if the boundary arrangement cannot be closed into loops.
PolyconvexRegion torus_union(std::span<const ConvexPolygon> grains, TorusWindow window);

/// Discrete Gauss-Bonnet: sum of signed turning angles over all loops, divided by 2 pi.
int euler_characteristic(const PolyconvexRegion& region);

/// Oriented boundary piece of a measured set; normal points out of the set.
struct BoundarySegment {
    Vec2 a;
    Vec2 b;
    Vec2 normal;
};

/// Z cap W for a convex observation window W lying inside the torus domain,
/// described by its boundary pieces (union boundary inside W plus the parts of
/// the window frame covered by Z) and its Euler characteristic.
struct WindowSection {
    std::vector<BoundarySegment> boundary;
    int euler = 0;
};

/// Requires W to fit in the domain with a margin larger than the grain diameter
/// so that no grain meets W through two different periodic copies.
WindowSection section_with_window(const PolyconvexRegion& region, const ConvexPolygon& window);

}  // namespace btl
