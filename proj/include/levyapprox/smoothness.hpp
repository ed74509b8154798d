#pragma once

#include <cmath>
#include <optional>

#include "levyapprox/levy_model.hpp"
#include "levyapprox/quadrature.hpp"
#include "levyapprox/sampling.hpp"

namespace levyapprox {

struct SmoothnessBounds {
    // 4 psi(2 eps)/eps^2 * int_{|x|<=eps} x^2 nu + int_{|x|>eps} psi(|x|) nu
    std::optional<double> local_bound;
    // nu(R), when finite
    std::optional<double> total_mass_bound;
    // 9 c min{ eps^{-1} int x^2 nu, int |x| nu }
    std::optional<double> linear_psi_bound;
    // (c/2) (int |x|^{3/2} nu)^2
    std::optional<double> three_halves_bound;
    double psi_cap = 0.0;      // linear small-ball cap c with psi(delta) <= c delta
    bool psi_cap_fitted = false;
};

namespace detail {

// Fit the linear cap c = max over a delta grid of psi(delta)/delta from
// Monte Carlo when the caller does not supply one.
inline double fit_psi_cap(const LevyModel& model, std::size_t paths,
                          std::uint64_t seed) {
    std::vector<double> grid;
    for (int i = -40; i <= 40; ++i) grid.push_back(0.25 * i);
    double cap = 0.0;
    for (double delta : {0.05, 0.1, 0.2, 0.4}) {
        const auto psi = psi_smallball(model, delta, paths, grid, seed);
        cap = std::max(cap, psi.est.value / delta);
    }
    return cap;
}

// int over |x| > lo of g(|x|) nu(dx), both signs.
inline double nu_tail_integral(const LevyModel& model, double lo,
                               const std::function<double(double)>& g) {
    if (const auto* a = model.atoms()) {
        double s = 0.0;
        for (const auto& atom : a->atoms)
            if (std::abs(atom.x) > lo) s += atom.rate * g(std::abs(atom.x));
        return s;
    }
    const auto& ts = *model.tempered_stable();
    auto density = [&](double x) {
        return 2.0 * ts.d * std::pow(x, -1.0 - ts.alpha) *
               std::pow(1.0 + x, -ts.m) * g(x);
    };
    return integrate_upper(density, lo);
}

}  // namespace detail

// Numeric right-hand sides of the fractional-smoothness sufficient
// conditions for the digital payoff; bounds whose moment hypotheses fail
// are reported as inapplicable (nullopt).
inline SmoothnessBounds smoothness_bounds(const LevyModel& model, double eps,
                                          std::optional<double> psi_cap,
                                          std::size_t paths = 100000,
                                          std::uint64_t seed = 1) {
    require(eps > 0.0, "smoothness_bounds: eps > 0 required");
    SmoothnessBounds out;
    if (psi_cap) {
        out.psi_cap = *psi_cap;
    } else {
        out.psi_cap = detail::fit_psi_cap(model, paths, seed);
        out.psi_cap_fitted = true;
    }
    const double c = out.psi_cap;
    auto psi_of = [&](double delta) { return std::min(1.0, c * delta); };

    if (!model.gaussian_only()) {
        const auto m2 = nu_moment(model, 2.0);
        // Local bound: small-jump mass below eps plus psi-weighted tail.
        if (m2) {
            double small2 = 0.0;
            if (const auto* a = model.atoms()) {
                for (const auto& atom : a->atoms)
                    if (std::abs(atom.x) <= eps)
                        small2 += atom.rate * atom.x * atom.x;
            } else {
                small2 = detail::ts_partial_moment(*model.tempered_stable(), 2.0,
                                                   0.0, eps);
            }
            const double tail = detail::nu_tail_integral(
                model, eps, [&](double x) { return psi_of(x); });
            out.local_bound = 4.0 * psi_of(2.0 * eps) / (eps * eps) * small2 + tail;

            out.linear_psi_bound =
                9.0 * c *
                std::min(*m2 / eps, nu_moment(model, 1.0).value_or(
                                        std::numeric_limits<double>::infinity()));
            if (!std::isfinite(*out.linear_psi_bound)) out.linear_psi_bound.reset();
        }
        out.total_mass_bound = nu_total(model);
        if (model.sigma() == 0.0) {
            const auto m32 = nu_moment(model, 1.5);
            if (m32) out.three_halves_bound = 0.5 * c * (*m32) * (*m32);
        }
    } else {
        out.total_mass_bound = 0.0;
        out.local_bound = 0.0;
        out.linear_psi_bound = 0.0;
    }
    return out;
}

}  // namespace levyapprox
