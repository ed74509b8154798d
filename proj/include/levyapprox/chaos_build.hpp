#pragma once

#include <cmath>
#include <vector>

#include "levyapprox/chaos.hpp"
#include "levyapprox/levy_model.hpp"
#include "levyapprox/orthopoly.hpp"
#include "levyapprox/payoff.hpp"
#include "levyapprox/quadrature.hpp"

namespace levyapprox {

namespace detail {

// Breakpoints where the payoff (as a function of z with x = sigma z) is
// not smooth; integration panels are split there.
inline std::vector<double> payoff_breakpoints(const PayoffSpec& p, double sigma) {
    std::vector<double> br;
    if (const auto* d = std::get_if<Digital>(&p)) br.push_back(d->K / sigma);
    if (const auto* md = std::get_if<MollifiedDigital>(&p)) {
        br.push_back(md->K / sigma);
        br.push_back((md->K + md->eps) / sigma);
    }
    if (const auto* tab = std::get_if<Tabulated>(&p))
        for (double g : tab->grid) br.push_back(g / sigma);
    return br;
}

// E[g(Z)] for piecewise-smooth g, splitting panels at the breakpoints.
inline double expect_gauss(const std::function<double(double)>& g,
                           std::vector<double> breaks) {
    breaks.push_back(-9.0);
    breaks.push_back(9.0);
    std::sort(breaks.begin(), breaks.end());
    double s = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double a = std::max(breaks[i - 1], -9.0);
        const double b = std::min(breaks[i], 9.0);
        if (b <= a) continue;
        s += integrate([&](double z) { return g(z) * normal_pdf(z); }, a, b);
    }
    return s;
}

// int_a^b he_m(z) phi(z) dz in closed form, he_m orthonormal.
inline double hermite_phi_integral(std::size_t m, double a, double b) {
    if (m == 0) return normal_cdf(b) - normal_cdf(a);
    std::vector<double> va(m), vb(m);
    hermite_orthonormal(a, va);
    hermite_orthonormal(b, vb);
    // d/dz [ he_{m-1}(z) phi(z) ] = -sqrt(m) he_m(z) phi(z)
    return (va[m - 1] * normal_pdf(a) - vb[m - 1] * normal_pdf(b)) /
           std::sqrt(static_cast<double>(m));
}

struct PayoffMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline PayoffMoments gauss_payoff_moments(const PayoffSpec& p, double sigma) {
    PayoffMoments out;
    if (const auto* d = std::get_if<Digital>(&p)) {
        const double kt = d->K / sigma;
        out.mean = 1.0 - normal_cdf(kt);
        out.variance = out.mean * (1.0 - out.mean);
        return out;
    }
    if (const auto* pol = std::get_if<Polynomial>(&p)) {
        // Exact via Gaussian moments of p(sigma z).
        std::vector<double> q(pol->coeffs);
        double pw = 1.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] *= pw;
            pw *= sigma;
        }
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            m1 += q[j] * gaussian_moment(j);
            for (std::size_t k = 0; k < q.size(); ++k)
                m2 += q[j] * q[k] * gaussian_moment(j + k);
        }
        out.mean = m1;
        out.variance = std::max(0.0, m2 - m1 * m1);
        return out;
    }
    const auto breaks = payoff_breakpoints(p, sigma);
    out.mean = expect_gauss([&](double z) { return payoff_eval(p, sigma * z); },
                            breaks);
    const double m2 = expect_gauss(
        [&](double z) {
            const double v = payoff_eval(p, sigma * z);
            return v * v;
        },
        breaks);
    out.variance = std::max(0.0, m2 - out.mean * out.mean);
    return out;
}

}  // namespace detail

// Chaos coefficients of f(X_1) for X = sigma W: orthonormal expansion of
// f(sigma Z) in Hermite polynomials. Extends the order until the
// remaining mass (payoff variance minus the partial sum) drops below
// 1e-10 of the variance, capped at n_max; the remainder is recorded as
// tail_b.
inline ChaosSeq gaussian_chaos(const PayoffSpec& payoff, double sigma,
                               std::size_t n_max) {
    require(sigma > 0.0, "gaussian_chaos: sigma > 0 required");
    require(n_max >= 1, "gaussian_chaos: n_max >= 1 required");
    validate(payoff);
    const auto mom = detail::gauss_payoff_moments(payoff, sigma);

    std::vector<double> c(n_max + 1, 0.0);
    std::size_t used = 0;
    double partial = 0.0;
    auto push = [&](std::size_t n, double cn) {
        c[n] = cn;
        partial += cn * cn;
        used = n;
    };
    const double tail_goal = 1e-10 * std::max(mom.variance, 1e-300);

    if (const auto* d = std::get_if<Digital>(&payoff)) {
        const double kt = d->K / sigma;
        std::vector<double> he(n_max);
        hermite_orthonormal(kt, he);
        const double pk = normal_pdf(kt);
        for (std::size_t n = 1; n <= n_max; ++n) {
            push(n, pk * he[n - 1] / std::sqrt(static_cast<double>(n)));
            if (mom.variance - partial < tail_goal) break;
        }
    } else if (const auto* pol = std::get_if<Polynomial>(&payoff)) {
        // Exact: expand p(sigma z) over the monomial Hermite table.
        std::vector<double> q(pol->coeffs);
        double pw = 1.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] *= pw;
            pw *= sigma;
        }
        const std::size_t deg = q.size() - 1;
        const auto he = hermite_monomial_table(std::min(deg, n_max));
        for (std::size_t n = 1; n < he.size(); ++n) {
            double cn = 0.0;
            for (std::size_t i = 0; i < he[n].size(); ++i)
                for (std::size_t j = 0; j < q.size(); ++j)
                    cn += he[n][i] * q[j] * gaussian_moment(i + j);
            push(n, cn);
        }
        used = std::min(deg, n_max);
    } else if (const auto* tab = std::get_if<Tabulated>(&payoff)) {
        // Gaussian integration by parts: c_n = (sigma/sqrt(n)) E f'(sigma Z)
        // he_{n-1}(Z); the piecewise-constant slope makes this closed form.
        for (std::size_t n = 1; n <= n_max; ++n) {
            double cn = 0.0;
            for (std::size_t i = 1; i < tab->grid.size(); ++i) {
                const double slope = (tab->values[i] - tab->values[i - 1]) /
                                     (tab->grid[i] - tab->grid[i - 1]);
                if (slope == 0.0) continue;
                cn += slope * detail::hermite_phi_integral(
                                  n - 1, tab->grid[i - 1] / sigma,
                                  tab->grid[i] / sigma);
            }
            push(n, sigma * cn / std::sqrt(static_cast<double>(n)));
            if (mom.variance - partial < tail_goal) break;
        }
    } else {
        const auto& md = std::get<MollifiedDigital>(payoff);
        const double a = md.K / sigma;
        const double b = (md.K + md.eps) / sigma;
        for (std::size_t n = 1; n <= n_max; ++n) {
            std::vector<double> he(n);
            const double cn = integrate(
                [&](double z) {
                    hermite_orthonormal(z, he);
                    return mollifier_slope(md.K, md.eps, sigma * z) * he[n - 1] *
                           normal_pdf(z);
                },
                a, b);
            push(n, sigma * cn / std::sqrt(static_cast<double>(n)));
            if (mom.variance - partial < tail_goal) break;
        }
    }

    c.resize(used + 1);
    ChaosSeq out = ChaosSeq::scalar(std::move(c), sigma * sigma);
    out.tail_b = std::max(0.0, mom.variance - partial);
    out.mean = mom.mean;
    out.payoff = payoff;
    return out;
}

// Chaos coefficients of f(X_1) for the single-atom model X_1 =
// x0 (N_1 - rate): Charlier expansion over the Poisson lattice. The
// orientation factor sign(x0)^n keeps the coefficients coherent with the
// orthonormal integral basis used elsewhere.
inline ChaosSeq poisson_chaos(const PayoffSpec& payoff, double x0, double rate,
                              std::size_t n_max) {
    require(x0 != 0.0 && rate > 0.0, "poisson_chaos: need x0 != 0, rate > 0");
    require(n_max >= 1, "poisson_chaos: n_max >= 1 required");
    validate(payoff);
    const double mu = x0 * x0 * rate;

    // Poisson(rate) lattice, cut where the remaining mass is negligible.
    std::vector<double> pmf;
    double p = std::exp(-rate), cum = 0.0;
    for (std::size_t k = 0;; ++k) {
        pmf.push_back(p);
        cum += p;
        if (1.0 - cum < 1e-18 && static_cast<double>(k) > rate) break;
        require(k < 100000, "poisson_chaos: lattice cutoff not reached");
        p *= rate / static_cast<double>(k + 1);
    }
    const double dropped = std::max(0.0, 1.0 - cum);

    std::vector<double> fx(pmf.size());
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        fx[k] = payoff_eval(payoff, x0 * (static_cast<double>(k) - rate));
        mean += pmf[k] * fx[k];
        m2 += pmf[k] * fx[k] * fx[k];
    }
    const double variance = std::max(0.0, m2 - mean * mean);
    const double tail_goal = 1e-10 * std::max(variance, 1e-300);

    const double s = x0 > 0.0 ? 1.0 : -1.0;
    std::vector<double> prev(pmf.size(), 1.0), cur(pmf.size()), next(pmf.size());
    const double sa = std::sqrt(rate);
    for (std::size_t k = 0; k < pmf.size(); ++k)
        cur[k] = (static_cast<double>(k) - rate) / sa;

    std::vector<double> c(n_max + 1, 0.0);
    double partial = 0.0;
    double sn = s;
    std::size_t used = 0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        double cn = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k)
            cn += pmf[k] * (fx[k] - mean) * cur[k];
        c[n] = sn * cn;
        partial += cn * cn;
        used = n;
        if (variance - partial < tail_goal) break;
        const double dn = static_cast<double>(n);
        for (std::size_t k = 0; k < pmf.size(); ++k)
            next[k] = (static_cast<double>(k) - dn - rate) * cur[k] /
                          (sa * std::sqrt(dn + 1.0)) -
                      std::sqrt(dn / (dn + 1.0)) * prev[k];
        std::swap(prev, cur);
        std::swap(cur, next);
        sn *= s;
    }

    c.resize(used + 1);
    ChaosSeq out = ChaosSeq::scalar(std::move(c), mu);
    out.tail_b = std::max(0.0, variance - partial);
    out.mean = mean;
    out.payoff = payoff;
    out.truncation_warning = dropped > 1e-12;
    return out;
}

// Difference-quotient form of the first Malliavin projection of f(X_1)
// for purely atomic models:
// phi_1 = sum_i [f(x + x_i) - f(x)]/x_i * x_i^2 rate_i / mu(R).
inline double phi1_difference_quotient(const PayoffSpec& payoff,
                                       const LevyModel& model,
                                       double x1_sample) {
    const auto* a = model.atoms();
    require(a != nullptr, "phi1_difference_quotient: atomic jump measure required");
    validate(payoff);
    const double mu = mu_total(model);
    double v = 0.0;
    for (const auto& atom : a->atoms) {
        const double dq = (payoff_eval(payoff, x1_sample + atom.x) -
                           payoff_eval(payoff, x1_sample)) /
                          atom.x;
        v += dq * atom.x * atom.x * atom.rate / mu;
    }
    if (model.sigma() > 0.0) {
        const auto fp = payoff_derivative(payoff, x1_sample);
        if (!fp || std::holds_alternative<Digital>(payoff))
            throw unsupported_model(
                "phi1_difference_quotient: sigma > 0 needs a differentiable payoff");
        v += model.sigma() * model.sigma() * (*fp) / mu;
    }
    return v;
}

}  // namespace levyapprox
