#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "levyapprox/error_functionals.hpp"
#include "levyapprox/time_net.hpp"

namespace levyapprox {

namespace detail {

// Interval costs C(i,j) = T(x_j) - T(x_i) - (x_j - x_i) T'(x_i) on the
// uniform grid x_j = j/G, from prefix tables of T and T'. C is a Monge
// cost (T'' >= 0), so each DP layer has monotone argmins and the row
// minima can be found by divide and conquer.
struct NetDp {
    std::vector<double> x, T, Tp;

    double cost(std::size_t i, std::size_t j) const {
        return std::max(0.0, T[j] - T[i] - (x[j] - x[i]) * Tp[i]);
    }
};

inline void dc_layer(const NetDp& dp, const std::vector<double>& prev,
                     std::vector<double>& cur, std::vector<std::size_t>& arg,
                     std::size_t lo, std::size_t hi, std::size_t opt_lo,
                     std::size_t opt_hi) {
    if (lo > hi) return;
    const std::size_t j = lo + (hi - lo) / 2;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = opt_lo;
    const std::size_t i_hi = std::min(opt_hi, j == 0 ? 0 : j - 1);
    for (std::size_t i = opt_lo; i <= i_hi; ++i) {
        if (prev[i] == std::numeric_limits<double>::infinity()) continue;
        const double v = prev[i] + dp.cost(i, j);
        if (v < best) {  // strict: ties keep the leftmost knot
            best = v;
            best_i = i;
        }
    }
    cur[j] = best;
    arg[j] = best_i;
    if (j > lo) dc_layer(dp, prev, cur, arg, lo, j - 1, opt_lo, best_i);
    if (j < hi) dc_layer(dp, prev, cur, arg, j + 1, hi, best_i, opt_hi);
}

}  // namespace detail

// Minimizes A(b, tau)^2 over nets with N intervals whose knots lie on
// the uniform grid {j/G}. Exact on the grid by dynamic programming;
// O(N G log G) through the monotone-argmin structure.
inline TimeNet optimize_net(const std::vector<double>& b, std::size_t N,
                            std::size_t grid_resolution) {
    require(N >= 1, "optimize_net: N >= 1 required");
    require(grid_resolution >= 10 * N,
            "optimize_net: grid_resolution >= 10 N required");
    double curvature_mass = 0.0;
    for (std::size_t n = 2; n < b.size(); ++n) curvature_mass += b[n];
    if (curvature_mass <= 0.0) return TimeNet::equidistant(N);  // any net optimal
    if (N == 1) return TimeNet(std::vector<double>{0.0, 1.0});

    const std::size_t G = grid_resolution;
    detail::NetDp dp;
    dp.x.resize(G + 1);
    dp.T.resize(G + 1);
    dp.Tp.resize(G + 1);
    for (std::size_t j = 0; j <= G; ++j) {
        dp.x[j] = static_cast<double>(j) / static_cast<double>(G);
        dp.T[j] = T_eval(b, dp.x[j]);
        dp.Tp[j] = T_eval(b, dp.x[j], 1);
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(G + 1, inf), cur(G + 1, inf);
    prev[0] = 0.0;
    std::vector<std::vector<std::size_t>> arg(
        N + 1, std::vector<std::size_t>(G + 1, 0));
    for (std::size_t k = 1; k <= N; ++k) {
        std::fill(cur.begin(), cur.end(), inf);
        const std::size_t j_lo = k;
        const std::size_t j_hi = G - (N - k);
        detail::dc_layer(dp, prev, cur, arg[k], j_lo, j_hi, k - 1, j_hi - 1);
        std::swap(prev, cur);
    }

    std::vector<double> pts(N + 1);
    std::size_t j = G;
    for (std::size_t k = N; k > 0; --k) {
        pts[k] = dp.x[j];
        j = arg[k][j];
    }
    pts[0] = 0.0;
    pts[N] = 1.0;
    return TimeNet(std::move(pts));
}

// Reference O(N G^2) dynamic program for validating the divide-and-conquer
// optimizer on small instances.
inline TimeNet optimize_net_brute(const std::vector<double>& b, std::size_t N,
                                  std::size_t grid_resolution) {
    require(N >= 1 && grid_resolution >= 10 * N, "optimize_net_brute: bad args");
    const std::size_t G = grid_resolution;
    detail::NetDp dp;
    dp.x.resize(G + 1);
    dp.T.resize(G + 1);
    dp.Tp.resize(G + 1);
    for (std::size_t j = 0; j <= G; ++j) {
        dp.x[j] = static_cast<double>(j) / static_cast<double>(G);
        dp.T[j] = T_eval(b, dp.x[j]);
        dp.Tp[j] = T_eval(b, dp.x[j], 1);
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> D(N + 1, std::vector<double>(G + 1, inf));
    std::vector<std::vector<std::size_t>> arg(
        N + 1, std::vector<std::size_t>(G + 1, 0));
    D[0][0] = 0.0;
    for (std::size_t k = 1; k <= N; ++k)
        for (std::size_t j = k; j <= G; ++j)
            for (std::size_t i = k - 1; i < j; ++i) {
                if (D[k - 1][i] == inf) continue;
                const double v = D[k - 1][i] + dp.cost(i, j);
                if (v < D[k][j]) {
                    D[k][j] = v;
                    arg[k][j] = i;
                }
            }
    std::vector<double> pts(N + 1);
    std::size_t j = G;
    for (std::size_t k = N; k > 0; --k) {
        pts[k] = dp.x[j];
        j = arg[k][j];
    }
    pts[0] = 0.0;
    pts[N] = 1.0;
    return TimeNet(std::move(pts));
}

struct ProbeRow {
    std::size_t N = 0;
    double scaled = 0.0;  // sqrt(N) * a_x_opt on the optimized net
};

struct ProbeResult {
    std::vector<ProbeRow> rows;
    double minimum = 0.0;
};

// sqrt(N)-scaled optimal error on optimized nets: bounded away from zero
// unless F is an affine function of X_1.
inline ProbeResult lower_bound_probe(const ChaosSeq& c,
                                     const std::vector<std::size_t>& Ns) {
    const auto b = chaos_norms(c);
    double curvature_mass = 0.0;
    for (std::size_t n = 2; n < b.size(); ++n) curvature_mass += b[n];
    if (curvature_mass <= 0.0)
        throw invalid_input(
            "DegenerateF: first-chaos variables are approximated exactly");
    ProbeResult out;
    out.minimum = std::numeric_limits<double>::infinity();
    for (std::size_t N : Ns) {
        const TimeNet net = optimize_net(b, N, 10 * N);
        const double v =
            std::sqrt(static_cast<double>(N)) * a_x_opt_exact(c, net);
        out.rows.push_back({N, v});
        out.minimum = std::min(out.minimum, v);
    }
    return out;
}

}  // namespace levyapprox
