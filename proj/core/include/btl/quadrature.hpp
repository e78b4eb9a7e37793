#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace btl {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
    /// Error estimate that was reached before giving up.
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

struct QuadratureOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    int max_depth = 15;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b]. `breaks` are interior points
/// where f has kinks or jumps; each sub-interval is integrated separately. The
/// relative tolerance refers to the integral of |f|, so integrals that cancel to
/// zero still converge.
/// Throws QuadratureError if the requested accuracy is not reached.
double integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks = {},
                 const QuadratureOptions& opt = {});

}  // namespace btl
