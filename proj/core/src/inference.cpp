#include "btl/inference.hpp"

#include <boost/random/uniform_int_distribution.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace btl {

namespace {

constexpr double pi = std::numbers::pi;

// Solves e Z = gamma ((alpha+1) own + other) / (alpha+2) for alpha.
double alpha_from_component(double z, double own, double other, double gamma, double survive_inv) {
    const double ez = survive_inv * z;
    const double denom = ez - gamma * own;
    if (std::abs(denom) <= 1e-12 * std::abs(gamma * own))
        throw AlphaDivergence("estimate_alpha: denominator vanishes (alpha -> infinity regime)");
    return (gamma * (own + other) - 2.0 * ez) / denom;
}

}  // namespace

double estimate_gamma(double phi_hat, double V2E) {
    if (!(V2E > 0.0)) throw std::invalid_argument("estimate_gamma: V2(E) must be positive");
    if (!(phi_hat >= 0.0)) throw std::invalid_argument("estimate_gamma: phi-hat must be >= 0");
    if (phi_hat >= 1.0) throw std::domain_error("estimate_gamma: phi-hat >= 1 (logarithm diverges)");
    return -std::log1p(-phi_hat) / V2E;
}

double estimate_alpha(const SymTensor2& phi_hat_Z, double phi_hat, const GrainAnalytics& grain, AlphaForm form) {
    if (phi_hat_Z.rank() != 2) throw std::invalid_argument("estimate_alpha: need a rank-2 tensor");
    const SymTensor2& e = grain.phi(2);
    const double a = e.m(1, 1), b = e.m(2, 2);
    if (std::abs(a - b) <= 1e-12 * std::abs(a + b))
        throw std::invalid_argument("estimate_alpha: grain is isotropic with respect to Phi_1^{0,2}");
    const double gamma = estimate_gamma(phi_hat, grain.V2);
    const double survive_inv = std::exp(gamma * grain.V2);
    const double a11 = alpha_from_component(phi_hat_Z.m(1, 1), a, b, gamma, survive_inv);
    if (form == AlphaForm::Component11) return a11;
    const double a22 = alpha_from_component(phi_hat_Z.m(2, 2), b, a, gamma, survive_inv);
    return 0.5 * (a11 + a22);
}

std::vector<BootstrapResult> bootstrap_columns(std::span<const std::span<const double>> columns, int n_boot, Rng& rng) {
    if (columns.empty() || columns.front().empty()) throw std::invalid_argument("bootstrap: empty sample");
    if (n_boot < 1) throw std::invalid_argument("bootstrap: n_boot must be positive");
    const std::size_t n = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw std::invalid_argument("bootstrap: columns differ in length");
    boost::random::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::vector<double>> means(columns.size(), std::vector<double>(static_cast<std::size_t>(n_boot)));
    std::vector<double> acc(columns.size());
    for (int b = 0; b < n_boot; ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = pick(rng);
            for (std::size_t c = 0; c < columns.size(); ++c) acc[c] += columns[c][i];
        }
        for (std::size_t c = 0; c < columns.size(); ++c) means[c][static_cast<std::size_t>(b)] = acc[c] / static_cast<double>(n);
    }
    std::vector<BootstrapResult> out;
    for (const auto& m : means) {
        if (std::all_of(m.begin(), m.end(), [&](double x) { return x == m.front(); })) {
            out.push_back({m.front(), 0.0});
            continue;
        }
        double mean = 0.0;
        for (double x : m) mean += x;
        mean /= static_cast<double>(m.size());
        double var = 0.0;
        for (double x : m) var += (x - mean) * (x - mean);
        out.push_back({mean, std::sqrt(var / static_cast<double>(m.size() - 1))});
    }
    return out;
}

BootstrapResult bootstrap(std::span<const double> values, int n_boot, Rng& rng) {
    const std::span<const double> cols[] = {values};
    return bootstrap_columns(cols, n_boot, rng).front();
}

TensorBootstrap bootstrap(std::span<const SymTensor2> values, int n_boot, Rng& rng) {
    if (values.empty()) throw std::invalid_argument("bootstrap: empty sample");
    const int rank = values.front().rank();
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(rank) + 1);
    for (const auto& v : values) {
        if (v.rank() != rank) throw std::invalid_argument("bootstrap: tensor ranks differ");
        for (int l = 0; l <= rank; ++l) comps[static_cast<std::size_t>(l)].push_back(v[l]);
    }
    const std::vector<std::span<const double>> cols(comps.begin(), comps.end());
    const auto res = bootstrap_columns(cols, n_boot, rng);
    TensorBootstrap out{SymTensor2(rank), SymTensor2(rank)};
    for (int l = 0; l <= rank; ++l) {
        out.mean[l] = res[static_cast<std::size_t>(l)].mean;
        out.se[l] = res[static_cast<std::size_t>(l)].se;
    }
    return out;
}

EstimatorReport estimate_replicates(std::span<const RealizationSummary> reps, const GrainAnalytics& grain,
                                    std::string grain_label, double gamma_true, double alpha_true, int n_boot,
                                    Rng& rng, AlphaForm form) {
    EstimatorReport rep;
    rep.gamma_true = gamma_true;
    rep.alpha_true = alpha_true;
    rep.grain_analytics = std::move(grain_label);
    for (const auto& r : reps) {
        if (!r.ok) continue;
        const auto it = r.surface.find(2);
        if (it == r.surface.end()) throw std::invalid_argument("estimate_replicates: summaries lack the s = 2 tensor");
        rep.gamma_hat.push_back(estimate_gamma(r.phi, grain.V2));
        try {
            rep.alpha_hat.push_back(estimate_alpha(it->second, r.phi, grain, form));
        } catch (const AlphaDivergence&) {
            ++rep.diverged;
        }
    }
    if (rep.gamma_hat.empty()) throw std::invalid_argument("estimate_replicates: no successful replicates");
    if (rep.alpha_hat.size() == rep.gamma_hat.size()) {
        const std::span<const double> cols[] = {rep.gamma_hat, rep.alpha_hat};
        const auto res = bootstrap_columns(cols, n_boot, rng);
        rep.gamma = res[0];
        rep.alpha = res[1];
    } else {
        rep.gamma = bootstrap(rep.gamma_hat, n_boot, rng);
        if (!rep.alpha_hat.empty()) rep.alpha = bootstrap(rep.alpha_hat, n_boot, rng);
    }
    rep.gamma_bias = rep.gamma.mean - gamma_true;
    rep.alpha_bias = rep.alpha_hat.empty() ? 0.0 : rep.alpha.mean - alpha_true;
    return rep;
}

FourierSeries fourier_coefficients(const std::map<int, SymTensor2>& tensors, int N) {
    return fourier_coefficients(tensors, {}, N);
}

FourierSeries fourier_coefficients(const std::map<int, SymTensor2>& tensors, const std::map<int, SymTensor2>& se, int N) {
    if (N < 0) throw std::invalid_argument("fourier_coefficients: N must be >= 0");
    FourierSeries out;
    out.N = N;
    out.coeffs.assign(static_cast<std::size_t>(2 * N + 1), {});
    if (!se.empty()) out.se.assign(out.coeffs.size(), {});
    for (int s = 0; s <= N; ++s) {
        const auto it = tensors.find(s);
        if (it == tensors.end() || it->second.rank() != s)
            throw std::invalid_argument("fourier_coefficients: missing tensor of rank " + std::to_string(s));
        const double scale = factorial(s) * omega(1 + s) / (2 * pi);
        // (-i)^{s-j} cycles through 1, -i, -1, i.
        std::complex<double> acc = 0.0;
        double var_re = 0.0, var_im = 0.0;
        const SymTensor2* err = nullptr;
        if (!se.empty()) {
            const auto e = se.find(s);
            if (e == se.end() || e->second.rank() != s)
                throw std::invalid_argument("fourier_coefficients: missing standard error of rank " + std::to_string(s));
            err = &e->second;
        }
        for (int j = 0; j <= s; ++j) {
            static constexpr std::complex<double> minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
            const std::complex<double> w = binomial(s, j) * scale * minus_i_pow[(s - j) % 4];
            acc += w * it->second[j];
            if (err) {
                var_re += std::pow(w.real() * (*err)[j], 2);
                var_im += std::pow(w.imag() * (*err)[j], 2);
            }
        }
        out.coeffs[static_cast<std::size_t>(N + s)] = acc;
        out.coeffs[static_cast<std::size_t>(N - s)] = std::conj(acc);
        if (err) {
            out.se[static_cast<std::size_t>(N + s)] = {std::sqrt(var_re), std::sqrt(var_im)};
            out.se[static_cast<std::size_t>(N - s)] = {std::sqrt(var_re), std::sqrt(var_im)};
        }
    }
    return out;
}

RadiusFunction reconstruct_radius(const FourierSeries& series, std::span<const double> grid) {
    RadiusFunction out;
    out.N = series.N;
    out.phi.assign(grid.begin(), grid.end());
    out.g.reserve(grid.size());
    for (double phi : grid) {
        std::complex<double> acc = 0.0;
        for (int s = -series.N; s <= series.N; ++s) acc += series(s) * std::polar(1.0, s * phi);
        out.g.push_back(acc.real());
        out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
    }
    return out;
}

std::vector<double> angle_grid(int n) {
    if (n < 1) throw std::invalid_argument("angle_grid: need n >= 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = 2 * pi * k / n;
    return out;
}

}  // namespace btl
