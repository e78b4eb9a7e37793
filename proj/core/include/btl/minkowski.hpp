#pragma once

#include <map>
#include <span>

#include "btl/geom2d.hpp"
#include "btl/tensor.hpp"

namespace btl {

/// Scalar functionals and surface tensors of a set. Depending on the producer the
/// entries are plain values or densities per unit area.
struct FunctionalSet {
    double V2 = 0.0;
    double V1 = 0.0;
    double V0 = 0.0;
    std::map<int, SymTensor2> surface;  ///< s -> Phi_1^{0,s}
};

/// Phi_1^{r,s} of a convex polygon: (1 / (r! s! w_{1+s})) sum_F u_F^s int_F x^r.
/// The result is the rank r+s tensor x^r u^s.
SymTensor2 surface_tensor_polygon(const ConvexPolygon& p, int r, int s);
/// Same edge sum over arbitrary oriented boundary pieces.
SymTensor2 surface_tensor_segments(std::span<const BoundarySegment> segments, int r, int s);
/// Same edge sum over every loop of a union boundary (no domain frame edges).
SymTensor2 surface_tensor_region(const PolyconvexRegion& region, int r, int s);

/// Phi_2^{r,0}(P) = (1/r!) int_P x^r dx.
SymTensor2 volume_moment_tensor(const ConvexPolygon& p, int r);
/// Volume moment of the region enclosed by consistently oriented boundary pieces.
SymTensor2 volume_moment_segments(std::span<const BoundarySegment> segments, int r);

/// Phi_0^{0,s} = (2 / (s! w_{s+1})) V0 Q^{s/2} for even s, zero for odd s.
SymTensor2 euler_point_tensor(double V0, int s);

/// Mixed functional 0V_{1,1}(P, Q) = (1/2pi) sum_ij L_i M_j a_ij sin a_ij with a_ij
/// the angle between the outer edge normals.
double mixed_V11(const ConvexPolygon& p, const ConvexPolygon& q);

/// Densities of a torus union per unit area of the fundamental domain.
FunctionalSet measure(const PolyconvexRegion& region, std::span<const int> s_list);

/// Values (not densities) of Z cap W from a window section.
FunctionalSet measure_section(const WindowSection& section, std::span<const int> s_list);

/// Midpoint-rule area of {x : P meets Q + x} on a grid of step h.
double translative_oracle(const ConvexPolygon& p, const ConvexPolygon& q, double h);

}  // namespace btl
