#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "levyapprox/common.hpp"

namespace levyapprox {

namespace detail {

// tanh-sinh node at abscissa t: position u in (0,1), its exact distance
// 1-u to the right endpoint, and the quadrature weight. u and 1-u are
// formed from q = exp(-2 |pi/2 sinh t|) directly, so endpoint distances
// keep full relative precision (needed for integrable singularities).
struct TsNode {
    double u = 0.5;
    double omu = 0.5;  // 1 - u
    double w = 0.0;
};

inline TsNode ts_node(double t) {
    const double half_pi = 1.5707963267948966;
    const double sh = half_pi * std::sinh(t);
    const double q = std::exp(-2.0 * std::abs(sh));
    const double denom = 1.0 + q;
    TsNode n;
    const double near = q / denom;  // distance to the closer endpoint
    const double far = 1.0 / denom;
    if (sh >= 0.0) {
        n.u = far;
        n.omu = near;
    } else {
        n.u = near;
        n.omu = far;
    }
    n.w = 2.0 * half_pi * std::cosh(t) * q / (denom * denom);
    return n;
}

}  // namespace detail

// tanh-sinh quadrature on (0,1). The integrand receives both u and 1-u
// at full precision; integrable endpoint singularities are handled and
// the integrand is never evaluated at 0 or 1 exactly.
inline double integrate01_2(const std::function<double(double, double)>& f,
                            double rel_tol = 1e-12, int max_level = 12) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    for (int level = 3; level <= max_level; ++level) {
        const double h = 4.0 / static_cast<double>(1 << level);
        double s = 0.0;
        for (double t = 0.0; t < 7.0; t += h) {
            for (double sgn : {1.0, -1.0}) {
                if (t == 0.0 && sgn < 0.0) continue;
                const auto n = detail::ts_node(sgn * t);
                if (n.w < 1e-320 || n.u <= 0.0 || n.omu <= 0.0) continue;
                const double fx = f(n.u, n.omu);
                if (std::isfinite(fx)) s += fx * n.w;
            }
        }
        value = s * h;
        if (level > 3 &&
            std::abs(value - prev) <= rel_tol * (std::abs(value) + 1e-300))
            return value;
        prev = value;
    }
    return value;
}

inline double integrate01(const std::function<double(double)>& f,
                          double rel_tol = 1e-12, int max_level = 12) {
    return integrate01_2([&](double u, double) { return f(u); }, rel_tol,
                         max_level);
}

// Integral over a finite interval (a,b); node positions stay accurate
// relative to whichever endpoint is closer.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-12) {
    if (b <= a) return 0.0;
    const double len = b - a;
    return len * integrate01_2(
                     [&](double u, double omu) {
                         const double x = u <= 0.5 ? a + len * u : b - len * omu;
                         return f(x);
                     },
                     rel_tol);
}

// Integral over (a, infinity) via x = a + u/(1-u).
inline double integrate_upper(const std::function<double(double)>& f, double a,
                              double rel_tol = 1e-12) {
    return integrate01_2(
        [&](double u, double omu) { return f(a + u / omu) / (omu * omu); },
        rel_tol);
}

}  // namespace levyapprox
