#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace btl {

/// Surface area of the unit sphere S^{m-1} in R^m: w_1 = 2, w_2 = 2 pi, w_3 = 4 pi.
double omega(int m);

double factorial(int n);
double binomial(int n, int k);

/// Symmetric tensor of rank s over R^2.
///
/// A symmetric tensor over R^2 is fixed by s+1 numbers; entry `l` holds the
/// component whose multi-index has l entries equal to 1 and s-l equal to 2,
/// e.g. for s = 2: comps = (T_22, T_12, T_11).
class SymTensor2 {
public:
    SymTensor2() = default;
    explicit SymTensor2(int rank);
    SymTensor2(int rank, std::vector<double> comps);

    static SymTensor2 scalar(double value);
    /// x^r, the r-fold symmetric power of a vector.
    static SymTensor2 power(double x1, double x2, int r);

    int rank() const { return rank_; }
    std::span<const double> comps() const { return comps_; }
    double operator[](int l) const { return comps_.at(static_cast<std::size_t>(l)); }
    double& operator[](int l) { return comps_.at(static_cast<std::size_t>(l)); }

    /// Component T_{i1..is} for an arbitrary multi-index of 1s and 2s.
    double at(std::span<const int> index) const;

    /// Entry (i, j) of a rank-2 tensor viewed as a 2x2 matrix, i, j in {1, 2}.
    double m(int i, int j) const;
    double trace() const;

    SymTensor2& operator+=(const SymTensor2& o);
    SymTensor2& operator-=(const SymTensor2& o);
    SymTensor2& operator*=(double k);

    /// Image under the rotation by theta: T'_{i..} = sum_j R_{i1 j1}..R_{is js} T_{j..}.
    SymTensor2 rotated(double theta) const;

    double max_abs() const;

    friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
    friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
    friend SymTensor2 operator*(SymTensor2 a, double k) { return a *= k; }
    friend SymTensor2 operator*(double k, SymTensor2 a) { return a *= k; }
    friend bool operator==(const SymTensor2&, const SymTensor2&) = default;

private:
    int rank_ = 0;
    std::vector<double> comps_{0.0};
};

/// Symmetric tensor product ab under normalized symmetrization
/// (average over all permutations of the rank(a)+rank(b) slots).
SymTensor2 sym_product(const SymTensor2& a, const SymTensor2& b);

/// Q^{s/2}, the symmetric power of the metric tensor. Rejects odd s.
SymTensor2 q_power(int s);

/// Largest componentwise |a - b|; ranks must match.
double max_abs_diff(const SymTensor2& a, const SymTensor2& b);

}  // namespace btl
