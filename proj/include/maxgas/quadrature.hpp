#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace maxgas {

/// Raised when an adaptive rule cannot reach the requested tolerance.
/// Callers map this to the quadrature-failure exit path.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   ///< accumulated error estimate
    bool converged = true;
};

struct QuadControl {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 28;   ///< bisection depth; 2^28 panels is past double resolution
};

/// Adaptive Gauss-Kronrod 7/15 on [a, b]. The error estimate per panel is
/// |K15 - G7|; panels split until the local estimate passes its share of the
/// tolerance. Integrand must be finite on the closed interval.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadControl& ctl = {});

/// Same, but throws QuadratureError when the estimate does not converge.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadControl& ctl = {}, const char* label = "integral");

/// Iterated 3-D integral over the box [lo, hi]^3 using nested adaptive 1-D
/// rules. No separability is assumed. Tolerances tighten inward by /8.
double integrate_box3(const std::function<double(double, double, double)>& f,
                      double lo, double hi, const QuadControl& ctl = {});

} // namespace maxgas
