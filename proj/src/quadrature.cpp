#include "maxgas/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace maxgas {
namespace {

// Gauss-Kronrod 7/15 abscissae on [0, 1] half-interval (symmetric pairs).
// Even indices are the embedded Gauss-7 points.
constexpr double kKronrodX[8] = {
    0.991455371120813,  // K
    0.949107912342759,  // G
    0.864864423359769,  // K
    0.741531185599394,  // G
    0.586087235467691,  // K
    0.405845151377397,  // G
    0.207784955007898,  // K
    0.0,                // G (centre)
};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

struct PanelEval {
    double k15;
    double err;
};

PanelEval eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k15 = kKronrodW[7] * f(c);
    double g7 = kGaussW[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodX[i];
        const double fs = f(c - dx) + f(c + dx);
        k15 += kKronrodW[i] * fs;
        if (i % 2 == 1) g7 += kGaussW[i / 2] * fs;
    }
    k15 *= h;
    g7 *= h;
    const double diff = std::fabs(k15 - g7);
    // Standard QUADPACK-style sharpening of the raw difference.
    const double err = diff * std::min(1.0, std::pow(200.0 * diff / (std::fabs(k15) + 1e-300), 1.5)) + diff * 1e-14;
    return {k15, std::max(err, std::fabs(k15) * 1e-15)};
}

void refine(const std::function<double(double)>& f, double a, double b, const PanelEval& pe,
            double tol_per_unit, int depth, const QuadControl& ctl, QuadResult& out) {
    const double local_budget = tol_per_unit * (b - a);
    if (pe.err <= local_budget || depth >= ctl.max_depth) {
        out.value += pe.k15;
        out.error += pe.err;
        if (pe.err > local_budget) out.converged = false;
        return;
    }
    const double c = 0.5 * (a + b);
    const PanelEval left = eval_panel(f, a, c);
    const PanelEval right = eval_panel(f, c, b);
    refine(f, a, c, left, tol_per_unit, depth + 1, ctl, out);
    refine(f, c, b, right, tol_per_unit, depth + 1, ctl, out);
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadControl& ctl) {
    QuadResult out;
    if (a == b) return out;
    const PanelEval whole = eval_panel(f, a, b);
    const double scale = std::max(std::fabs(whole.k15), 1e-300);
    const double tol = std::max(ctl.abs_tol, ctl.rel_tol * scale);
    refine(f, a, b, whole, tol / std::fabs(b - a), 0, ctl, out);
    // A panel that stopped on depth may still satisfy the global budget.
    if (!out.converged && out.error <= std::max(ctl.abs_tol, ctl.rel_tol * std::fabs(out.value))) {
        out.converged = true;
    }
    return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadControl& ctl, const char* label) {
    const QuadResult r = integrate_adaptive(f, a, b, ctl);
    if (!r.converged) {
        throw QuadratureError(std::string(label) + ": tolerance not met (error estimate " +
                              std::to_string(r.error) + ")");
    }
    return r.value;
}

double integrate_box3(const std::function<double(double, double, double)>& f,
                      double lo, double hi, const QuadControl& ctl) {
    QuadControl inner = ctl;
    inner.abs_tol = ctl.abs_tol / 8.0;
    inner.rel_tol = ctl.rel_tol / 8.0;
    QuadControl innermost = inner;
    innermost.abs_tol = inner.abs_tol / 8.0;
    innermost.rel_tol = inner.rel_tol / 8.0;
    auto fz = [&](double x, double y) {
        return integrate_or_throw([&](double z) { return f(x, y, z); }, lo, hi, innermost, "box3 z");
    };
    auto fyz = [&](double x) {
        return integrate_or_throw([&](double y) { return fz(x, y); }, lo, hi, inner, "box3 y");
    };
    return integrate_or_throw([&](double x) { return fyz(x); }, lo, hi, ctl, "box3 x");
}

} // namespace maxgas
