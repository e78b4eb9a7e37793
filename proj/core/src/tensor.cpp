#include "btl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btl {

double omega(int m) {
    if (m < 1) throw std::invalid_argument("omega: m must be >= 1");
    // w_m = 2 pi^{m/2} / Gamma(m/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

double factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial: negative argument");
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return std::round(b);
}

SymTensor2::SymTensor2(int rank) : rank_(rank), comps_(static_cast<std::size_t>(rank) + 1, 0.0) {
    if (rank < 0) throw std::invalid_argument("SymTensor2: negative rank");
}

SymTensor2::SymTensor2(int rank, std::vector<double> comps) : rank_(rank), comps_(std::move(comps)) {
    if (rank < 0 || comps_.size() != static_cast<std::size_t>(rank) + 1)
        throw std::invalid_argument("SymTensor2: component count must be rank + 1");
}

SymTensor2 SymTensor2::scalar(double value) { return SymTensor2(0, {value}); }

SymTensor2 SymTensor2::power(double x1, double x2, int r) {
    SymTensor2 t(r);
    for (int l = 0; l <= r; ++l) t.comps_[l] = std::pow(x1, l) * std::pow(x2, r - l);
    return t;
}

double SymTensor2::at(std::span<const int> index) const {
    if (static_cast<int>(index.size()) != rank_) throw std::invalid_argument("SymTensor2::at: index length != rank");
    const auto ones = std::count(index.begin(), index.end(), 1);
    return comps_[static_cast<std::size_t>(ones)];
}

double SymTensor2::m(int i, int j) const {
    if (rank_ != 2) throw std::logic_error("SymTensor2::m requires rank 2");
    return comps_[static_cast<std::size_t>((i == 1) + (j == 1))];
}

double SymTensor2::trace() const { return m(1, 1) + m(2, 2); }

SymTensor2& SymTensor2::operator+=(const SymTensor2& o) {
    if (o.rank_ != rank_) throw std::invalid_argument("SymTensor2: rank mismatch in +");
    for (std::size_t l = 0; l < comps_.size(); ++l) comps_[l] += o.comps_[l];
    return *this;
}

SymTensor2& SymTensor2::operator-=(const SymTensor2& o) {
    if (o.rank_ != rank_) throw std::invalid_argument("SymTensor2: rank mismatch in -");
    for (std::size_t l = 0; l < comps_.size(); ++l) comps_[l] -= o.comps_[l];
    return *this;
}

SymTensor2& SymTensor2::operator*=(double k) {
    for (double& c : comps_) c *= k;
    return *this;
}

SymTensor2 SymTensor2::rotated(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double r11 = c, r12 = -s, r21 = s, r22 = c;
    const int n = rank_;
    SymTensor2 out(n);
    for (int l = 0; l <= n; ++l) {
        double acc = 0.0;
        // k of the first l summation indices equal 1, m of the last n-l.
        for (int k = 0; k <= l; ++k) {
            const double head = binomial(l, k) * std::pow(r11, k) * std::pow(r12, l - k);
            for (int m = 0; m <= n - l; ++m) {
                const double tail = binomial(n - l, m) * std::pow(r21, m) * std::pow(r22, n - l - m);
                acc += head * tail * comps_[static_cast<std::size_t>(k + m)];
            }
        }
        out.comps_[static_cast<std::size_t>(l)] = acc;
    }
    return out;
}

double SymTensor2::max_abs() const {
    double m = 0.0;
    for (double c : comps_) m = std::max(m, std::abs(c));
    return m;
}

SymTensor2 sym_product(const SymTensor2& a, const SymTensor2& b) {
    const int r = a.rank(), s = b.rank(), n = r + s;
    SymTensor2 out(n);
    const double norm = binomial(n, r);
    for (int l = 0; l <= n; ++l) {
        double acc = 0.0;
        for (int k = std::max(0, l - s); k <= std::min(l, r); ++k)
            acc += binomial(l, k) * binomial(n - l, r - k) * a[k] * b[l - k];
        out[l] = acc / norm;
    }
    return out;
}

SymTensor2 q_power(int s) {
    if (s < 0 || s % 2 != 0) throw std::invalid_argument("q_power: s must be even and non-negative");
    const SymTensor2 q(2, {1.0, 0.0, 1.0});
    SymTensor2 out = SymTensor2::scalar(1.0);
    for (int i = 0; i < s / 2; ++i) out = sym_product(out, q);
    return out;
}

double max_abs_diff(const SymTensor2& a, const SymTensor2& b) { return (a - b).max_abs(); }

}  // namespace btl
