#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "btl/geom2d.hpp"
#include "btl/tensor.hpp"

namespace btl {

/// Orientation parameter value for fully aligned grains (all rotations are 0).
inline constexpr double kAlphaInfinity = std::numeric_limits<double>::infinity();

struct ModelParams {
    double gamma = 1.0;  ///< intensity, grains per unit area
    double alpha = 0.0;  ///< orientation parameter in [0, inf]
    BaseGrain grain;

    bool aligned() const { return std::isinf(alpha); }
    /// Throws std::invalid_argument on gamma <= 0, alpha < 0 or NaN, or an invalid grain.
    void validate() const;
};

struct GrainAnalytics {
    double V2 = 0.0;
    double V1 = 0.0;
    std::vector<SymTensor2> surface;  ///< surface[s] = Phi_1^{0,s}(E), s = 0..s_max
    /// Curvature radius r(E, u(phi)) as a function of the normal angle; empty for polygons.
    std::function<double(double)> radius;

    int s_max() const { return static_cast<int>(surface.size()) - 1; }
    const SymTensor2& phi(int s) const;
};

/// c(alpha) = Gamma(1 + alpha/2) / (2 sqrt(pi) Gamma((alpha+1)/2)); rejects alpha = inf.
double normalization_c(double alpha);
/// f_alpha(theta) = c(alpha) |cos theta|^alpha.
double orientation_density(double alpha, double theta);
/// int theta11^s1 theta12^s2 theta21^s3 theta22^s4 f_alpha over [0, 2 pi] in closed form.
double rotation_moment(double alpha, int s1, int s2, int s3, int s4);

/// p^2 q^2 / (p^2 u1^2 + q^2 u2^2)^{3/2} at u = (cos phi, sin phi).
double ellipse_curvature_radius(double p, double q, double phi);

/// Grain-level values. Rectangles and polygons use the edge formula; ellipses use
/// adaptive quadrature of the curvature-radius representation.
GrainAnalytics grain_analytics(const BaseGrain& grain, int s_max = 2);

/// Density of the surface tensor of the particle process, Phi-bar_1^{0,s}(X).
SymTensor2 density_surface_tensor_X(double gamma, double alpha, const GrainAnalytics& g, int s);
SymTensor2 density_surface_tensor_X(const ModelParams& params, int s);

/// phi = 1 - exp(-gamma V2(E)).
double volume_fraction(const ModelParams& params);

SymTensor2 surface_tensor_density_Z(const ModelParams& params, int s);
/// c_1^{0,2}(alpha, E) = Phi-bar_1^{0,2}(X) / (V2(E) gamma); independent of gamma.
SymTensor2 c1_coeff(double alpha, const GrainAnalytics& g);
/// (phi - 1) ln(1 - phi) c1.
SymTensor2 surface_tensor_curve(double phi, const SymTensor2& c1);

/// 0V_{1,1}(rotate(E, theta), E).
double mixed_V11_rotated(const BaseGrain& grain, double theta);
/// Mixed density 0V-bar_{1,1}(X, X).
double mixed_density_V11_X(const ModelParams& params);

/// c0(alpha, E) = 0V-bar_{1,1}(X,X) / (2 V2(E) gamma^2); independent of gamma.
double c0_coeff(double alpha, const BaseGrain& grain);
double c0_coeff(const ModelParams& params);
/// V-bar_0(Z) = exp(-gamma V2) (gamma - 0V-bar_{1,1}(X,X) / 2).
double euler_density_Z(const ModelParams& params);
/// (1 - phi)(1 + c0 ln(1 - phi)), equal to V-bar_0(Z) / gamma.
double euler_curve(double phi, double c0);

struct IntrinsicDensities {
    double V0 = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;
};
IntrinsicDensities intrinsic_volume_densities_Z(const ModelParams& params);

/// Ratio E[(Phi_1^{0,2})_11] / E[(Phi_1^{0,2})_22] of the union set in a window.
double anisotropy_ratio(const ModelParams& params);

/// Proportionality constant a~(n, j, s) of isotropic tensor densities; rejects odd s.
double isotropic_constant(int n, int j, int s);

/// 0V-bar_{1,1}(W, X) = gamma int 0V_{1,1}(W, rotate(E, theta)) f_alpha(theta) dtheta.
double mixed_V11_window_X(const ModelParams& params, const ConvexPolygon& window);

/// E[Phi_j^{r,s}(Z cap W)] for j = 2 (s = 0), j = 1, and j = 0 (r = 0).
SymTensor2 mean_value_window(const ModelParams& params, const ConvexPolygon& window, int j, int r, int s);

/// Conversion to the W_j^{r,s} normalization of the Papaya software, 0 < j <= 2.
SymTensor2 papaya_normalization(int j, int r, int s, const SymTensor2& phi_2_minus_j);

}  // namespace btl
