#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "btl/analytic.hpp"
#include "btl/sampler.hpp"
#include "btl/tensor.hpp"

namespace btl {

/// gamma-hat = -ln(1 - phi-hat) / V2(E).
double estimate_gamma(double phi_hat, double V2E);

/// Raised when the alpha estimator's denominator vanishes, the alpha -> inf regime.
class AlphaDivergence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class AlphaForm {
    Component11,   ///< the (1,1)-component estimator
    Symmetrized,   ///< mean of the (1,1) and (2,2) component estimators
};

/// Orientation parameter from the measured density Phi-hat_1^{0,2}(Z) and area fraction.
/// Values below -1 are returned as is. Throws std::invalid_argument for grains with
/// (Phi_1^{0,2}(E))_11 = (Phi_1^{0,2}(E))_22 and AlphaDivergence for a vanishing denominator.
double estimate_alpha(const SymTensor2& phi_hat_Z, double phi_hat, const GrainAnalytics& grain,
                      AlphaForm form = AlphaForm::Component11);

struct BootstrapResult {
    double mean = 0.0;
    double se = 0.0;
};

struct TensorBootstrap {
    SymTensor2 mean;
    SymTensor2 se;
};

/// Resamples replicates with replacement n_boot times, using the same draws for every
/// column (all columns must have equal length). Returns the mean and standard
/// deviation of the resampled means per column.
std::vector<BootstrapResult> bootstrap_columns(std::span<const std::span<const double>> columns, int n_boot, Rng& rng);

BootstrapResult bootstrap(std::span<const double> values, int n_boot, Rng& rng);
/// Componentwise, with resample draws shared between components.
TensorBootstrap bootstrap(std::span<const SymTensor2> values, int n_boot, Rng& rng);

struct EstimatorReport {
    std::vector<double> gamma_hat;
    std::vector<double> alpha_hat;
    std::size_t diverged = 0;          ///< replicates excluded from alpha-hat for a zero denominator
    BootstrapResult gamma;
    BootstrapResult alpha;
    double gamma_true = 0.0;
    double alpha_true = 0.0;
    double gamma_bias = 0.0;           ///< bootstrap mean minus truth
    double alpha_bias = 0.0;
    std::string grain_analytics;       ///< which grain description fed the estimators
};

/// Per-replicate estimates from simulation summaries (which must carry s = 2) and
/// their bootstrap summaries; failed replicates are skipped.
EstimatorReport estimate_replicates(std::span<const RealizationSummary> reps, const GrainAnalytics& grain,
                                    std::string grain_label, double gamma_true, double alpha_true, int n_boot,
                                    Rng& rng, AlphaForm form = AlphaForm::Component11);

/// Coefficients g-hat(-N..N) of g(phi) = gamma E[r(Z0, u(phi))]; entry k is g-hat(k - N).
struct FourierSeries {
    int N = 0;
    std::vector<std::complex<double>> coeffs;
    /// Linearly propagated standard errors of the real and imaginary parts; empty
    /// for exact inputs.
    std::vector<std::complex<double>> se;

    std::complex<double> operator()(int s) const { return coeffs.at(static_cast<std::size_t>(s + N)); }
};

/// tensors[s] = Phi-bar_1^{0,s}(X) for s = 0..N. Throws std::invalid_argument on a missing rank.
FourierSeries fourier_coefficients(const std::map<int, SymTensor2>& tensors, int N);
/// As above with componentwise standard errors of the tensors.
FourierSeries fourier_coefficients(const std::map<int, SymTensor2>& tensors, const std::map<int, SymTensor2>& se, int N);

struct RadiusFunction {
    std::vector<double> phi;
    std::vector<double> g;
    int N = 0;
    double max_imag = 0.0;   ///< largest |Im| of the partial sums on the grid
};

RadiusFunction reconstruct_radius(const FourierSeries& series, std::span<const double> grid);
/// n equispaced angles 2 pi k / n.
std::vector<double> angle_grid(int n);

}  // namespace btl
