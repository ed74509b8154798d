#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "levyapprox/common.hpp"

namespace levyapprox {

struct Digital {
    double K = 0.0;  // f = 1_(K,inf)
};

// Smooth ramp: 0 on (-inf,K], 1 on [K+eps,inf), derivative in [0, 2/eps].
struct MollifiedDigital {
    double K = 0.0;
    double eps = 1.0;
};

struct Polynomial {
    std::vector<double> coeffs;  // c0 + c1 x + c2 x^2 + ...
};

// Piecewise linear through (grid[i], values[i]), constant outside.
struct Tabulated {
    std::vector<double> grid;
    std::vector<double> values;
};

using PayoffSpec = std::variant<Digital, MollifiedDigital, Polynomial, Tabulated>;

// Clamped cubic smoothstep between K and K+eps; max slope 1.5/eps.
inline double mollifier_eval(double K, double eps, double x) {
    require(eps > 0.0 && eps <= 1.0, "mollifier_eval: eps in (0,1] required");
    const double u = (x - K) / eps;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

inline double mollifier_slope(double K, double eps, double x) {
    const double u = (x - K) / eps;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 6.0 * u * (1.0 - u) / eps;
}

inline void validate(const PayoffSpec& p) {
    if (const auto* md = std::get_if<MollifiedDigital>(&p))
        require(md->eps > 0.0 && md->eps <= 1.0,
                "MollifiedDigital: eps in (0,1] required");
    if (const auto* pol = std::get_if<Polynomial>(&p))
        require(!pol->coeffs.empty(), "Polynomial: empty coefficient list");
    if (const auto* tab = std::get_if<Tabulated>(&p)) {
        require(tab->grid.size() >= 2 && tab->grid.size() == tab->values.size(),
                "Tabulated: need matching grid/values with >= 2 nodes");
        for (std::size_t i = 1; i < tab->grid.size(); ++i)
            require(tab->grid[i] > tab->grid[i - 1],
                    "Tabulated: grid must be strictly increasing");
    }
}

inline double payoff_eval(const PayoffSpec& p, double x) {
    if (const auto* d = std::get_if<Digital>(&p)) return x > d->K ? 1.0 : 0.0;
    if (const auto* md = std::get_if<MollifiedDigital>(&p))
        return mollifier_eval(md->K, md->eps, x);
    if (const auto* pol = std::get_if<Polynomial>(&p)) {
        double v = 0.0;
        for (std::size_t j = pol->coeffs.size(); j-- > 0;)
            v = v * x + pol->coeffs[j];
        return v;
    }
    const auto& tab = std::get<Tabulated>(p);
    if (x <= tab.grid.front()) return tab.values.front();
    if (x >= tab.grid.back()) return tab.values.back();
    const auto it = std::upper_bound(tab.grid.begin(), tab.grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - tab.grid.begin());
    const double w = (x - tab.grid[i - 1]) / (tab.grid[i] - tab.grid[i - 1]);
    return tab.values[i - 1] + w * (tab.values[i] - tab.values[i - 1]);
}

// Pointwise derivative where it exists; nullopt at kinks and for the
// digital payoff (distributional derivative only).
inline std::optional<double> payoff_derivative(const PayoffSpec& p, double x) {
    if (const auto* d = std::get_if<Digital>(&p))
        return x == d->K ? std::nullopt : std::optional<double>(0.0);
    if (const auto* md = std::get_if<MollifiedDigital>(&p))
        return mollifier_slope(md->K, md->eps, x);
    if (const auto* pol = std::get_if<Polynomial>(&p)) {
        double v = 0.0;
        for (std::size_t j = pol->coeffs.size(); j-- > 1;)
            v = v * x + static_cast<double>(j) * pol->coeffs[j];
        return v;
    }
    const auto& tab = std::get<Tabulated>(p);
    for (double g : tab.grid)
        if (x == g) return std::nullopt;
    if (x < tab.grid.front() || x > tab.grid.back()) return 0.0;
    const auto it = std::upper_bound(tab.grid.begin(), tab.grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - tab.grid.begin());
    return (tab.values[i] - tab.values[i - 1]) / (tab.grid[i] - tab.grid[i - 1]);
}

}  // namespace levyapprox
