#pragma once

#include <cmath>
#include <span>

#include "levyapprox/common.hpp"

namespace levyapprox {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244008444);
}

// Orthonormal probabilists' Hermite polynomials under N(0,1):
// vals[n] = He_n(z)/sqrt(n!). Three-term recurrence, stable in n.
inline void hermite_orthonormal(double z, std::span<double> vals) {
    if (vals.empty()) return;
    vals[0] = 1.0;
    if (vals.size() == 1) return;
    vals[1] = z;
    for (std::size_t n = 1; n + 1 < vals.size(); ++n) {
        const double dn = static_cast<double>(n);
        vals[n + 1] = (z * vals[n] - std::sqrt(dn) * vals[n - 1]) /
                      std::sqrt(dn + 1.0);
    }
}

// Orthonormal Charlier polynomials under Poisson(a), evaluated at the
// lattice point k. Sign convention fixed by c_1(k) = (k - a)/sqrt(a).
inline void charlier_orthonormal(double k, double a, std::span<double> vals) {
    require(a > 0.0, "charlier_orthonormal: a > 0 required");
    if (vals.empty()) return;
    vals[0] = 1.0;
    if (vals.size() == 1) return;
    const double sa = std::sqrt(a);
    vals[1] = (k - a) / sa;
    for (std::size_t n = 1; n + 1 < vals.size(); ++n) {
        const double dn = static_cast<double>(n);
        vals[n + 1] = (k - dn - a) * vals[n] / (sa * std::sqrt(dn + 1.0)) -
                      std::sqrt(dn / (dn + 1.0)) * vals[n - 1];
    }
}

// Monomial coefficients of the orthonormal Hermite polynomials up to
// degree n: out[n][j] is the z^j coefficient. Exact for moderate degree.
inline std::vector<std::vector<double>> hermite_monomial_table(std::size_t n) {
    std::vector<std::vector<double>> he(n + 1);
    he[0] = {1.0};
    if (n == 0) return he;
    he[1] = {0.0, 1.0};
    for (std::size_t m = 1; m < n; ++m) {
        const double dm = static_cast<double>(m);
        std::vector<double> next(m + 2, 0.0);
        for (std::size_t j = 0; j <= m; ++j) next[j + 1] += he[m][j];
        for (std::size_t j = 0; j < he[m - 1].size(); ++j)
            next[j] -= std::sqrt(dm) * he[m - 1][j];
        for (double& v : next) v /= std::sqrt(dm + 1.0);
        he[m + 1] = std::move(next);
    }
    return he;
}

// E[Z^m] for Z ~ N(0,1): (m-1)!! for even m, 0 for odd m.
inline double gaussian_moment(std::size_t m) {
    if (m % 2 == 1) return 0.0;
    double v = 1.0;
    for (std::size_t j = 1; j < m; j += 2) v *= static_cast<double>(j);
    return v;
}

}  // namespace levyapprox
