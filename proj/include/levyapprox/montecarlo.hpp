#pragma once

#include <cmath>
#include <vector>

#include "levyapprox/chaos.hpp"
#include "levyapprox/error_functionals.hpp"
#include "levyapprox/orthopoly.hpp"
#include "levyapprox/sampling.hpp"

namespace levyapprox {

// kappa(a,b) = int_a^b E (S_t^a)^2 dt = (e^{mu (b-a)} - 1)/mu.
inline double kappa(const LevyModel& model, double a, double b) {
    require(0.0 <= a && a <= b && b <= 1.0, "kappa: need 0 <= a <= b <= 1");
    const double mu = mu_total(model);
    return std::expm1(mu * (b - a)) / mu;
}

// Doleans-Dade exponential of X along the bundle's net, exact for the
// finite-activity jump part (product over recorded jumps). Returns
// paths x (N+1) values with S_0 = 1.
inline std::vector<std::vector<double>> simulate_S(const PathBundle& bundle,
                                                   const LevyModel& model) {
    const std::size_t N = bundle.intervals();
    const bool positive = check_exponential_positive(model);
    std::vector<std::vector<double>> S(bundle.paths,
                                       std::vector<double>(N + 1, 1.0));
    // Group jump factors per (path, interval).
    std::vector<double> jump_factor(bundle.paths * N, 1.0);
    for (const auto& jr : bundle.jump_records)
        jump_factor[jr.path * N + (jr.interval - 1)] *= 1.0 + jr.size;
    for (std::size_t p = 0; p < bundle.paths; ++p) {
        for (std::size_t k = 1; k <= N; ++k) {
            const std::size_t idx = p * N + (k - 1);
            const double dt = bundle.net[k] - bundle.net[k - 1];
            const double factor =
                std::exp(bundle.gauss[idx] - 0.5 * bundle.gauss_var_rate * dt -
                         bundle.drift_per_unit * dt) *
                jump_factor[idx];
            if (positive && factor <= 0.0)
                throw numeric_failure("PositivityViolated in simulate_S");
            S[p][k] = S[p][k - 1] * factor;
        }
    }
    return S;
}

// Integrand martingale phi_t evaluated from the chaos coefficients and
// the time-t state of X, via the orthonormal polynomial representation
// of the iterated integrals (Hermite for Gaussian models, Charlier for a
// single atom).
inline double phi_eval(const ChaosSeq& c, const LevyModel& model, double t,
                       double x_state) {
    require(c.mode == ChaosMode::Scalar, "phi_eval: scalar mode only");
    require(t >= 0.0 && t < 1.0 + 1e-12, "phi_eval: t in [0,1] required");
    const std::size_t n_cap = c.n_cap();
    const double inv_smu = 1.0 / std::sqrt(c.mu);
    if (t <= 0.0 || n_cap == 0) return c.coeff.size() > 1 ? c.coeff[1] * inv_smu : 0.0;

    std::vector<double> pn(n_cap);
    double sign = 1.0;
    if (model.gaussian_only()) {
        require(model.sigma() > 0.0, "phi_eval: sigma > 0 required");
        hermite_orthonormal(x_state / (model.sigma() * std::sqrt(t)), pn);
    } else if (model.single_atom()) {
        if (model.sigma() != 0.0)
            throw unsupported_model(
                "phi_eval: mixed diffusion+jump models unsupported");
        const Atom& atom = model.atoms()->atoms[0];
        const double count =
            std::round(x_state / atom.x + atom.rate * t);
        charlier_orthonormal(count, atom.rate * t, pn);
        sign = atom.x > 0.0 ? 1.0 : -1.0;
    } else {
        throw unsupported_model("phi_eval: Gaussian-only or single-atom only");
    }

    std::vector<double> terms(n_cap, 0.0);
    double tp = 1.0;  // t^(n/2)
    double sn = 1.0;  // sign^n
    const double st = std::sqrt(t);
    for (std::size_t n = 0; n < n_cap; ++n) {
        terms[n] = std::sqrt(static_cast<double>(n + 1)) * c.coeff[n + 1] * tp *
                   sn * pn[n];
        tp *= st;
        sn *= sign;
    }
    return inv_smu * pairwise_sum(terms);
}

namespace detail {

// F = sum_n c_n * (orthonormal iterated integral at t=1), i.e. the
// truncated chaos value of the centered variable from the t=1 state.
inline double chaos_value_at_one(const ChaosSeq& c, const LevyModel& model,
                                 double x1) {
    const std::size_t n_cap = c.n_cap();
    std::vector<double> pn(n_cap + 1);
    double sign = 1.0;
    if (model.gaussian_only()) {
        hermite_orthonormal(x1 / model.sigma(), pn);
    } else {
        const Atom& atom = model.atoms()->atoms[0];
        const double count = std::round(x1 / atom.x + atom.rate);
        charlier_orthonormal(count, atom.rate, pn);
        sign = atom.x > 0.0 ? 1.0 : -1.0;
    }
    std::vector<double> terms(n_cap + 1, 0.0);
    double sn = sign;
    for (std::size_t n = 1; n <= n_cap; ++n) {
        terms[n] = c.coeff[n] * sn * pn[n];
        sn *= sign;
    }
    return pairwise_sum(terms);
}

inline McEstimate l2_from_sq_samples(const std::vector<double>& sq,
                                     std::uint64_t seed) {
    const double dp = static_cast<double>(sq.size());
    const double mean = pairwise_sum(sq) / dp;
    std::vector<double> dev(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double d = sq[i] - mean;
        dev[i] = d * d;
    }
    const double var = pairwise_sum(dev) / std::max(1.0, dp - 1.0);
    const double se_mean = std::sqrt(var / dp);
    McEstimate out;
    out.value = std::sqrt(std::max(0.0, mean));
    // Delta method for the root; degenerate (exact-zero) case guarded.
    out.std_error = out.value > 0.0 ? se_mean / (2.0 * out.value) : se_mean;
    out.paths = sq.size();
    out.seed = seed;
    return out;
}

}  // namespace detail

struct SimErrorResult {
    McEstimate est;
    bool used_exact_payoff = false;
    double chaos_tail = 0.0;  // b-mass beyond the truncation
};

// L2 error of the simple Riemann strategy with integrand values
// phi_{t_{k-1}} against Y = X or S on the net.
inline SimErrorResult sim_error_mc(const ChaosSeq& c, const LevyModel& model,
                                   const TimeNet& tau, Process y,
                                   std::size_t paths, std::uint64_t seed) {
    require(paths >= 2, "sim_error_mc: paths >= 2 required");
    if (y == Process::S)
        require(check_exponential_positive(model),
                "sim_error_mc: S-mode requires nu((-inf,-1]) = 0");
    const PathBundle bundle = sample_increments(model, tau, paths, seed);
    const std::size_t N = tau.intervals();
    std::vector<std::vector<double>> S;
    if (y == Process::S) S = simulate_S(bundle, model);

    SimErrorResult out;
    out.used_exact_payoff = c.payoff.has_value();
    out.chaos_tail = c.tail_b;

    std::vector<double> sq(paths, 0.0);
    std::vector<double> xk(N + 1);
    for (std::size_t p = 0; p < paths; ++p) {
        xk[0] = 0.0;
        for (std::size_t k = 1; k <= N; ++k)
            xk[k] = xk[k - 1] + bundle.x_increment(p, k);
        const double f = out.used_exact_payoff
                             ? payoff_eval(*c.payoff, xk[N]) - c.mean
                             : detail::chaos_value_at_one(c, model, xk[N]);
        double riemann = 0.0;
        for (std::size_t k = 1; k <= N; ++k) {
            const double phi = phi_eval(c, model, tau[k - 1], xk[k - 1]);
            // For Y = S the simple coefficient is phi/S_{t_{k-1}}, which
            // turns the increments S^{t_{k-1}}_{t_k} - 1 of the restarted
            // exponential into plain increments of S.
            const double coef = y == Process::X ? phi : phi / S[p][k - 1];
            const double dy = y == Process::X ? xk[k] - xk[k - 1]
                                              : S[p][k] - S[p][k - 1];
            riemann += coef * dy;
        }
        const double r = f - riemann;
        sq[p] = r * r;
    }
    out.est = detail::l2_from_sq_samples(sq, seed);
    if (!out.used_exact_payoff &&
        std::sqrt(out.chaos_tail) > 0.1 * std::max(out.est.value, 1e-300))
        throw numeric_failure(
            "TruncationDominates: chaos tail exceeds 10% of the estimated error");
    return out;
}

// Empirical projection of F onto the span of basis(state) * (S-increment)
// across intervals: an upward-biased estimate of the optimal error that
// never exceeds the simple strategy in-sample (the basis contains phi).
inline McEstimate opt_error_mc_regression(const ChaosSeq& c,
                                          const LevyModel& model,
                                          const TimeNet& tau, Process y,
                                          std::size_t paths,
                                          std::size_t basis_size,
                                          std::uint64_t seed) {
    require(y == Process::S, "opt_error_mc_regression: Y = S only");
    require(basis_size >= 1 && basis_size <= 5,
            "opt_error_mc_regression: basis_size in 1..5");
    require(paths >= 16, "opt_error_mc_regression: paths >= 16 required");
    require(check_exponential_positive(model),
            "opt_error_mc_regression: requires nu((-inf,-1]) = 0");

    const PathBundle bundle = sample_increments(model, tau, paths, seed);
    const std::size_t N = tau.intervals();
    const auto S = simulate_S(bundle, model);
    const std::size_t m = N * basis_size;

    std::vector<double> f(paths);
    std::vector<double> Z(paths * m);
    std::vector<double> xk(N + 1);
    for (std::size_t p = 0; p < paths; ++p) {
        xk[0] = 0.0;
        for (std::size_t k = 1; k <= N; ++k)
            xk[k] = xk[k - 1] + bundle.x_increment(p, k);
        f[p] = c.payoff ? payoff_eval(*c.payoff, xk[N]) - c.mean
                        : detail::chaos_value_at_one(c, model, xk[N]);
        for (std::size_t k = 1; k <= N; ++k) {
            const double ds = S[p][k] - S[p][k - 1];
            const double x = xk[k - 1];
            double* row = &Z[p * m + (k - 1) * basis_size];
            for (std::size_t b = 0; b < basis_size; ++b) {
                // b = 0 is the simple coefficient phi/S, so the regression
                // span always contains the simple strategy.
                const double psi =
                    b == 0 ? phi_eval(c, model, tau[k - 1], x) / S[p][k - 1]
                           : std::pow(x, static_cast<double>(b - 1));
                row[b] = psi * ds;
            }
        }
    }

    // Least squares through modified Gram-Schmidt on the design columns.
    // Columns that become (numerically) dependent are dropped, which only
    // removes redundant directions, so enlarging the basis can never
    // increase the in-sample residual. Z is column-major from here on.
    std::vector<double> Q(paths * m);
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t i = 0; i < m; ++i) Q[i * paths + p] = Z[p * m + i];

    std::vector<char> kept(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        double* qj = &Q[j * paths];
        double orig = 0.0;
        for (std::size_t p = 0; p < paths; ++p) orig += qj[p] * qj[p];
        orig = std::sqrt(orig);
        // Two MGS passes keep the basis orthogonal to roundoff.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                if (!kept[i]) continue;
                const double* qi = &Q[i * paths];
                double r = 0.0;
                for (std::size_t p = 0; p < paths; ++p) r += qi[p] * qj[p];
                for (std::size_t p = 0; p < paths; ++p) qj[p] -= r * qi[p];
            }
        }
        double nrm = 0.0;
        for (std::size_t p = 0; p < paths; ++p) nrm += qj[p] * qj[p];
        nrm = std::sqrt(nrm);
        if (orig <= 0.0 || nrm <= 1e-10 * orig) continue;  // dependent column
        kept[j] = 1;
        for (std::size_t p = 0; p < paths; ++p) qj[p] /= nrm;
    }

    std::vector<double> resid(f);
    for (std::size_t i = 0; i < m; ++i) {
        if (!kept[i]) continue;
        const double* qi = &Q[i * paths];
        double ci = 0.0;
        for (std::size_t p = 0; p < paths; ++p) ci += qi[p] * resid[p];
        for (std::size_t p = 0; p < paths; ++p) resid[p] -= ci * qi[p];
    }

    std::vector<double> sq(paths);
    for (std::size_t p = 0; p < paths; ++p) sq[p] = resid[p] * resid[p];
    return detail::l2_from_sq_samples(sq, seed);
}

}  // namespace levyapprox
