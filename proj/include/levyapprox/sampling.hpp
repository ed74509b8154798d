#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "levyapprox/levy_model.hpp"
#include "levyapprox/rng.hpp"
#include "levyapprox/time_net.hpp"

namespace levyapprox {

struct JumpRecord {
    std::uint32_t path = 0;
    std::uint32_t interval = 0;  // 1-based interval index
    double time = 0.0;
    double size = 0.0;
};

// Sampled increments of X on a net, decomposed into the Gaussian part
// (including the matched-variance replacement of truncated small jumps)
// and the finite-activity jump part. Layout is row-major paths x N.
struct PathBundle {
    explicit PathBundle(TimeNet n) : net(std::move(n)) {}

    TimeNet net;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    double gauss_var_rate = 0.0;  // per-unit-time variance of the Gaussian part
    double drift_per_unit = 0.0;  // compensator rate of the simulated jumps
    std::vector<double> gauss;
    std::vector<double> jump_sum;
    std::vector<std::uint32_t> jump_count;
    std::vector<JumpRecord> jump_records;

    std::size_t intervals() const { return net.intervals(); }

    double x_increment(std::size_t p, std::size_t k) const {
        const std::size_t idx = p * intervals() + (k - 1);
        const double dt = net[k] - net[k - 1];
        return gauss[idx] + jump_sum[idx] - drift_per_unit * dt;
    }
};

namespace detail {

// One tempered-stable jump size above eps: Pareto proposal
// x = eps U^(-1/alpha) accepted with probability ((1+eps)/(1+x))^m.
inline double ts_jump_size(const TemperedStable& ts, PathRng& rng) {
    for (;;) {
        const double x = ts.eps_trunc *
                         std::pow(rng.uniform(), -1.0 / ts.alpha);
        const double acc =
            std::pow((1.0 + ts.eps_trunc) / (1.0 + x), ts.m);
        if (rng.uniform() <= acc) return rng.uniform() < 0.5 ? -x : x;
    }
}

}  // namespace detail

// Deterministic per (seed, path index): the draw order within a path is
// fixed, so any parallel split over paths reproduces the same bundle.
inline PathBundle sample_increments(const LevyModel& model, const TimeNet& net,
                                    std::size_t paths, std::uint64_t seed) {
    require(paths >= 1, "sample_increments: paths >= 1 required");
    PathBundle out{net};
    out.seed = seed;
    out.paths = paths;
    const std::size_t N = net.intervals();
    out.gauss.assign(paths * N, 0.0);
    out.jump_sum.assign(paths * N, 0.0);
    out.jump_count.assign(paths * N, 0);

    double small_var = 0.0;  // variance of truncated small jumps (per unit time)
    double lambda = 0.0;     // intensity of simulated jumps
    const auto* ts = model.tempered_stable();
    if (ts != nullptr) {
        small_var = detail::ts_partial_moment(*ts, 2.0, 0.0, ts->eps_trunc);
        lambda = detail::ts_partial_moment(*ts, 0.0, ts->eps_trunc,
                                           std::numeric_limits<double>::infinity());
    }
    out.gauss_var_rate = model.sigma() * model.sigma() + small_var;
    out.drift_per_unit = compensator_drift(model, ts ? ts->eps_trunc : 0.0);

    const auto* atoms = model.atoms();
    for (std::size_t p = 0; p < paths; ++p) {
        PathRng rng(seed, p);
        for (std::size_t k = 1; k <= N; ++k) {
            const std::size_t idx = p * N + (k - 1);
            const double s = net[k - 1];
            const double dt = net[k] - s;
            if (out.gauss_var_rate > 0.0)
                out.gauss[idx] = std::sqrt(out.gauss_var_rate * dt) * rng.normal();
            if (atoms != nullptr) {
                for (const auto& atom : atoms->atoms) {
                    const std::uint32_t n = rng.poisson(atom.rate * dt);
                    for (std::uint32_t j = 0; j < n; ++j)
                        out.jump_records.push_back(
                            {static_cast<std::uint32_t>(p),
                             static_cast<std::uint32_t>(k),
                             s + dt * rng.uniform(), atom.x});
                    out.jump_count[idx] += n;
                    out.jump_sum[idx] += atom.x * static_cast<double>(n);
                }
            } else if (ts != nullptr) {
                const std::uint32_t n = rng.poisson(lambda * dt);
                for (std::uint32_t j = 0; j < n; ++j) {
                    const double x = detail::ts_jump_size(*ts, rng);
                    out.jump_records.push_back({static_cast<std::uint32_t>(p),
                                                static_cast<std::uint32_t>(k),
                                                s + dt * rng.uniform(), x});
                    out.jump_sum[idx] += x;
                }
                out.jump_count[idx] += n;
            }
        }
    }
    return out;
}

struct PsiEstimate {
    McEstimate est;
    double lambda_star = 0.0;
    bool grid_too_coarse = false;
};

// Monte Carlo estimate of the small-ball function
// psi(delta) = sup_lambda P(|X_1 - lambda| <= delta): scans the supplied
// grid, then locally refines around the empirical argmax.
inline PsiEstimate psi_smallball(const LevyModel& model, double delta,
                                 std::size_t paths,
                                 const std::vector<double>& lambda_grid,
                                 std::uint64_t seed) {
    require(delta >= 0.0, "psi_smallball: delta >= 0 required");
    require(paths >= 1000, "psi_smallball: paths >= 1000 required");
    require(!lambda_grid.empty(), "psi_smallball: empty lambda grid");

    const TimeNet one(std::vector<double>{0.0, 1.0});
    const PathBundle bundle = sample_increments(model, one, paths, seed);
    std::vector<double> x1(paths);
    for (std::size_t p = 0; p < paths; ++p) x1[p] = bundle.x_increment(p, 1);
    std::sort(x1.begin(), x1.end());

    auto count_near = [&](double lam) {
        const auto lo = std::lower_bound(x1.begin(), x1.end(), lam - delta);
        const auto hi = std::upper_bound(x1.begin(), x1.end(), lam + delta);
        return static_cast<std::size_t>(hi - lo);
    };

    std::size_t best_count = 0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const std::size_t n = count_near(lambda_grid[i]);
        if (n > best_count) {
            best_count = n;
            best_idx = i;
        }
    }
    PsiEstimate out;
    out.grid_too_coarse = lambda_grid.size() >= 2 &&
                          (best_idx == 0 || best_idx + 1 == lambda_grid.size());
    double best_lam = lambda_grid[best_idx];

    // Local refinement between the neighbors of the coarse argmax.
    double lo = best_idx > 0 ? lambda_grid[best_idx - 1] : best_lam;
    double hi = best_idx + 1 < lambda_grid.size() ? lambda_grid[best_idx + 1]
                                                  : best_lam;
    for (int pass = 0; pass < 3; ++pass) {
        const double step = (hi - lo) / 32.0;
        if (step <= 0.0) break;
        for (int i = 0; i <= 32; ++i) {
            const double lam = lo + step * static_cast<double>(i);
            const std::size_t n = count_near(lam);
            if (n > best_count) {
                best_count = n;
                best_lam = lam;
            }
        }
        lo = best_lam - step;
        hi = best_lam + step;
    }

    const double dp = static_cast<double>(paths);
    const double phat = static_cast<double>(best_count) / dp;
    out.est.value = phat;
    out.est.std_error = std::sqrt(std::max(phat * (1.0 - phat), 1.0 / dp) / dp);
    out.est.paths = paths;
    out.est.seed = seed;
    out.lambda_star = best_lam;
    return out;
}

}  // namespace levyapprox
