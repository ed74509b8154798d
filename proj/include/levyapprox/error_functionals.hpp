#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "levyapprox/chaos.hpp"
#include "levyapprox/quadrature.hpp"
#include "levyapprox/time_net.hpp"

namespace levyapprox {

enum class Process { X, S };

// T(t) = sum b_n t^n and its first two derivatives (termwise).
inline double T_eval(const std::vector<double>& b, double t, int derivative = 0) {
    require(t >= 0.0 && t <= 1.0, "T_eval: t in [0,1] required");
    require(derivative >= 0 && derivative <= 2, "T_eval: derivative in {0,1,2}");
    std::vector<double> terms;
    terms.reserve(b.size());
    double tp = 1.0;  // t^(n - derivative)
    for (std::size_t n = 0; n < b.size(); ++n) {
        const double dn = static_cast<double>(n);
        double w = 1.0;
        if (derivative >= 1) w *= dn;
        if (derivative == 2) w *= dn - 1.0;
        if (dn >= static_cast<double>(derivative)) {
            terms.push_back(w * b[n] * tp);
            tp *= t;
        }
    }
    return pairwise_sum(terms);
}

// Power-series weights of the curvature function: H^2(t) = sum_n w[n] t^(n-1),
// n = 1..w.size()-1. For Y = X this reproduces T''.
inline std::vector<double> h_series(const ChaosSeq& c, Process y) {
    const std::size_t n_cap = c.n_cap();
    std::vector<double> w(n_cap + 1, 0.0);
    if (c.mode == ChaosMode::Scalar) {
        const double smu = std::sqrt(c.mu);
        for (std::size_t n = 1; n <= n_cap; ++n) {
            const double dn = static_cast<double>(n);
            const double cn1 = n + 1 <= n_cap ? c.coeff[n + 1] : 0.0;
            if (y == Process::X) {
                w[n] = dn * (dn + 1.0) * cn1 * cn1;
            } else {
                const double d = std::sqrt(dn + 1.0) * cn1 - smu * c.coeff[n];
                w[n] = dn * d * d;
            }
        }
        return w;
    }
    // AtomicTensor: ||A_n||^2 under mu^{tensor n} with A_n^X = (n+1) h_n and
    // A_n^S = (n+1) h_n - h_{n-1} embedded constantly in the last coordinate.
    const std::size_t a = c.atom_masses.size();
    require(n_cap <= 12 || a == 1,
            "h_series: tensor mode capped at order 12 for >= 2 atoms");
    for (std::size_t n = 1; n <= n_cap; ++n) {
        std::size_t sz = 1;
        for (std::size_t k = 0; k < n; ++k) sz *= a;
        std::vector<double> A(sz, 0.0);
        if (n < n_cap) {
            const auto& hn = c.tensors[n];  // order n
            for (std::size_t i = 0; i < sz; ++i)
                A[i] = static_cast<double>(n + 1) * hn[i];
        }
        if (y == Process::S) {
            const auto& hm = c.tensors[n - 1];  // order n-1
            const std::size_t base_sz = sz / a;
            for (std::size_t i = 0; i < a; ++i)
                for (std::size_t b2 = 0; b2 < base_sz; ++b2)
                    A[i * base_sz + b2] -= hm[b2];
        }
        const double norm = detail::tensor_norm_sq(A, n, c.atom_masses);
        w[n] = c.mu * static_cast<double>(n) *
               std::exp(detail::log_factorial(n)) * norm;
    }
    return w;
}

inline double H_sq(const ChaosSeq& c, double t, Process y) {
    require(t >= 0.0 && t < 1.0 + 1e-12, "H_sq: t in [0,1) required");
    const auto w = h_series(c, y);
    std::vector<double> terms;
    terms.reserve(w.size());
    double tp = 1.0;
    for (std::size_t n = 1; n < w.size(); ++n) {
        terms.push_back(w[n] * tp);
        tp *= t;
    }
    return pairwise_sum(terms);
}

// A(b, tau)^2 = sum_k int (t_k - t) T''(t) dt, evaluated through the
// closed form T(e) - T(s) - (e - s) T'(s) per interval.
inline double A_functional(const std::vector<double>& b, const TimeNet& tau) {
    std::vector<double> parts;
    parts.reserve(tau.intervals());
    for (std::size_t k = 1; k <= tau.intervals(); ++k) {
        const double s = tau[k - 1];
        const double e = tau[k];
        const double v =
            T_eval(b, e) - T_eval(b, s) - (e - s) * T_eval(b, s, 1);
        parts.push_back(std::max(0.0, v));
    }
    return std::sqrt(pairwise_sum(parts));
}

namespace detail {

// sum_n w[n] * sum_k int_s^e (e-t) t^(n-1) dt via running powers.
inline double net_weighted_sum(const std::vector<double>& w, const TimeNet& tau) {
    std::vector<double> parts;
    parts.reserve(tau.intervals());
    for (std::size_t k = 1; k <= tau.intervals(); ++k) {
        const double s = tau[k - 1];
        const double e = tau[k];
        double sp = s, ep = e;  // s^n, e^n
        double acc = 0.0;
        for (std::size_t n = 1; n < w.size(); ++n) {
            const double dn = static_cast<double>(n);
            const double jn = e * (ep - sp) / dn - (ep * e - sp * s) / (dn + 1.0);
            acc += w[n] * jn;
            sp *= s;
            ep *= e;
        }
        parts.push_back(std::max(0.0, acc));
    }
    return pairwise_sum(parts);
}

}  // namespace detail

// Exact optimal X-approximation error on the net; equals A_functional of
// the chaos norms by the curvature identity, but computed through the
// per-term interval integrals as an independent route.
inline double a_x_opt_exact(const ChaosSeq& c, const TimeNet& tau) {
    return std::sqrt(detail::net_weighted_sum(h_series(c, Process::X), tau));
}

struct Bracket {
    double low = 0.0;
    double high = 0.0;
    double v = 0.0;         // net-weighted H_S integral, square-rooted
    double constant = 1.0;  // c = (1 - sqrt(mu |tau|))^{-1}
};

// Two-sided enclosure of the simple S-approximation error:
// v/c <= a_S^sim <= c v with c = (1 - sqrt(mu |tau|))^{-1}.
inline Bracket a_s_sim_bracket(const ChaosSeq& c, const TimeNet& tau) {
    const double mesh = tau.mesh();
    if (mesh * c.mu >= 1.0)
        throw invalid_input("MeshTooCoarse: need |tau| < 1/mu for the bracket");
    Bracket out;
    out.v = std::sqrt(detail::net_weighted_sum(h_series(c, Process::S), tau));
    out.constant = 1.0 / (1.0 - std::sqrt(c.mu * mesh));
    out.low = out.v / out.constant;
    out.high = out.v * out.constant;
    return out;
}

// Bound on |a_S^sim - a_X^opt| with the explicit proof constants:
// |tau| mu e^{mu/2} ||F|| + sqrt(|tau|) sqrt(mu/2) e^{mu/2} a_X^opt.
inline double gap_bound(const ChaosSeq& c, const TimeNet& tau) {
    const double mesh = tau.mesh();
    const double mu = c.mu;
    const double em = std::exp(0.5 * mu);
    const double f_norm = std::sqrt(l2_norm_sq(c));
    const double a_opt = a_x_opt_exact(c, tau);
    return mesh * mu * em * f_norm +
           std::sqrt(mesh) * std::sqrt(0.5 * mu) * em * a_opt;
}

// Pointwise curvature-gap bound |H_S(t) - H_X(t)| <= mu ||phi_t|| with
// ||phi_t||^2 = T'(t)/mu.
inline double h_gap_bound(const ChaosSeq& c, double t) {
    require(t >= 0.0 && t < 1.0, "h_gap_bound: t in [0,1) required");
    return std::sqrt(c.mu * T_eval(chaos_norms(c), t, 1));
}

struct LimitConstant {
    double value = 0.0;
    Verdict verdict = Verdict::Convergent;
    double block_exponent = 0.0;
};

// Limit of N * a^2 on theta-nets: (1/2theta) int (1-t)^(1-theta) H^2 dt,
// summed termwise through Beta integrals B(n, 2-theta).
inline LimitConstant limit_constant(const ChaosSeq& c, double theta, Process y) {
    require(theta > 0.0 && theta <= 1.0, "limit_constant: theta in (0,1]");
    const auto w = h_series(c, y);
    const double lg2t = std::lgamma(2.0 - theta);
    std::vector<double> terms(w.size(), 0.0);
    for (std::size_t n = 1; n < w.size(); ++n) {
        const double dn = static_cast<double>(n);
        const double lbeta =
            std::lgamma(dn) + lg2t - std::lgamma(dn + 2.0 - theta);
        terms[n] = w[n] * std::exp(lbeta);
    }
    LimitConstant out;
    out.value = pairwise_sum(terms) / (2.0 * theta);
    const BlockTrend bt = block_trend(terms);
    out.verdict = bt.verdict;
    out.block_exponent = bt.exponent;
    return out;
}

struct RateRow {
    std::size_t N = 0;
    double a = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;
    double slope = 0.0;  // least-squares slope of log a vs log N
};

inline RateTable rate_sweep(const ChaosSeq& c, double theta,
                            const std::vector<std::size_t>& Ns) {
    require(Ns.size() >= 4, "rate_sweep: need >= 4 net sizes");
    for (std::size_t i = 1; i < Ns.size(); ++i)
        require(Ns[i] > Ns[i - 1], "rate_sweep: sizes must be increasing");
    RateTable out;
    std::vector<double> lx, ly;
    for (std::size_t N : Ns) {
        const double a = a_x_opt_exact(c, TimeNet::theta(N, theta));
        out.rows.push_back({N, a});
        lx.push_back(std::log(static_cast<double>(N)));
        ly.push_back(std::log(a));
    }
    out.slope = ls_slope(lx, ly);
    return out;
}

struct SmoothnessCriteria {
    Verdict beta_series = Verdict::Convergent;  // int (1-t)^(1-theta) T'' dt
    double beta_exponent = 0.0;
    Verdict h_x_integral = Verdict::Convergent;  // int_0^1 H_X dt
    Verdict h_s_integral = Verdict::Convergent;  // int_0^1 H_S dt
};

namespace detail {

// Divergence test for int_0^1 g(t) dt with possible blow-up at 1: block
// integrals over [1 - 2^-j, 1 - 2^-(j+1)] fitted as 2^(rho j). Blocks
// are limited to the range the series truncation resolves.
inline BlockTrend endpoint_integral_trend(const std::function<double(double)>& g,
                                          std::size_t n_cap) {
    std::vector<double> lx, ly;
    const std::size_t j_max =
        static_cast<std::size_t>(std::log2(static_cast<double>(std::max<std::size_t>(n_cap, 8)))) - 1;
    for (std::size_t j = 1; j <= j_max; ++j) {
        const double a = 1.0 - std::pow(2.0, -static_cast<double>(j));
        const double b = 1.0 - std::pow(2.0, -static_cast<double>(j + 1));
        const double v = integrate(g, a, b, 1e-9);
        if (v > 0.0) {
            lx.push_back(static_cast<double>(j));
            ly.push_back(std::log2(v));
        }
    }
    BlockTrend out;
    if (lx.size() < 3) {
        out.verdict = Verdict::Convergent;
        out.exponent = -1.0;
        return out;
    }
    const std::size_t keep = std::min<std::size_t>(lx.size(), 6);
    const std::size_t off = lx.size() - keep;
    out.exponent = ls_slope(std::span(lx).subspan(off), std::span(ly).subspan(off));
    if (out.exponent < -0.02)
        out.verdict = Verdict::Convergent;
    else if (out.exponent > 0.02)
        out.verdict = Verdict::Divergent;
    else
        out.verdict = Verdict::Inconclusive;
    return out;
}

}  // namespace detail

inline SmoothnessCriteria smoothness_criteria(const ChaosSeq& c, double theta) {
    require(theta > 0.0 && theta <= 1.0, "smoothness_criteria: theta in (0,1]");
    SmoothnessCriteria out;
    const auto b = chaos_norms(c);
    const double lg2t = std::lgamma(2.0 - theta);
    std::vector<double> terms(b.size(), 0.0);
    for (std::size_t n = 2; n < b.size(); ++n) {
        const double dn = static_cast<double>(n);
        const double lbeta =
            std::lgamma(dn - 1.0) + lg2t - std::lgamma(dn + 1.0 - theta);
        terms[n] = dn * (dn - 1.0) * b[n] * std::exp(lbeta);
    }
    const BlockTrend bs = block_trend(terms);
    out.beta_series = bs.verdict;
    out.beta_exponent = bs.exponent;
    const std::size_t n_cap = c.n_cap();
    out.h_x_integral =
        detail::endpoint_integral_trend(
            [&](double t) { return std::sqrt(std::max(0.0, H_sq(c, t, Process::X))); },
            n_cap)
            .verdict;
    out.h_s_integral =
        detail::endpoint_integral_trend(
            [&](double t) { return std::sqrt(std::max(0.0, H_sq(c, t, Process::S))); },
            n_cap)
            .verdict;
    return out;
}

struct ErrorReport {
    std::vector<double> net_points;
    double a_x_opt = 0.0;
    std::optional<Bracket> a_s_sim_bracket;  // absent when |tau| >= 1/mu
    double gap_bound = 0.0;
    std::optional<double> limit_constant_theta;
};

inline ErrorReport make_error_report(const ChaosSeq& c, const TimeNet& tau,
                                     std::optional<double> theta,
                                     Process y = Process::S) {
    ErrorReport out;
    out.net_points = tau.points();
    out.a_x_opt = a_x_opt_exact(c, tau);
    if (tau.mesh() * c.mu < 1.0) out.a_s_sim_bracket = a_s_sim_bracket(c, tau);
    out.gap_bound = gap_bound(c, tau);
    if (theta) {
        const auto lc = limit_constant(c, *theta, y);
        if (lc.verdict != Verdict::Divergent) out.limit_constant_theta = lc.value;
    }
    return out;
}

}  // namespace levyapprox
