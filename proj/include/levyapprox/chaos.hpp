#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "levyapprox/common.hpp"
#include "levyapprox/payoff.hpp"

namespace levyapprox {

enum class ChaosMode { Scalar, AtomicTensor };

enum class Verdict { Convergent, Divergent, Inconclusive };

namespace detail {

// Dense order-k tensor over `atoms` indices: flat index in base `atoms`.
inline double tensor_norm_sq(const std::vector<double>& t, std::size_t order,
                             const std::vector<double>& masses) {
    const std::size_t a = masses.size();
    if (order == 0) {
        require(t.size() == 1, "tensor_norm_sq: order-0 tensor has one entry");
        return t[0] * t[0];
    }
    std::size_t total = 1;
    for (std::size_t k = 0; k < order; ++k) total *= a;
    require(t.size() == total, "tensor_norm_sq: size mismatch");
    double s = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        double w = 1.0;
        std::size_t rest = flat;
        for (std::size_t k = 0; k < order; ++k) {
            w *= masses[rest % a];
            rest /= a;
        }
        s += t[flat] * t[flat] * w;
    }
    return s;
}

// Average over all index permutations (enforces kernel symmetry).
inline std::vector<double> tensor_symmetrize(const std::vector<double>& t,
                                             std::size_t order, std::size_t a) {
    if (order <= 1) return t;
    std::vector<std::size_t> perm(order);
    for (std::size_t k = 0; k < order; ++k) perm[k] = k;
    std::vector<double> out(t.size(), 0.0);
    std::size_t count = 0;
    std::vector<std::size_t> digits(order);
    do {
        for (std::size_t flat = 0; flat < t.size(); ++flat) {
            std::size_t rest = flat;
            for (std::size_t k = 0; k < order; ++k) {
                digits[k] = rest % a;
                rest /= a;
            }
            std::size_t src = 0;
            for (std::size_t k = order; k-- > 0;)
                src = src * a + digits[perm[k]];
            out[flat] += t[src];
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& v : out) v /= static_cast<double>(count);
    return out;
}

inline double log_factorial(std::size_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace detail

// Chaos data of a mean-zero random variable built from stochastic
// integrals against X. Scalar mode stores the orthonormal coefficients
// c_n (so the chaos norms are b_n = c_n^2); the raw kernel values
// h_{n-1} = c_n / sqrt(n! mu^n) are recoverable where representable.
// AtomicTensor mode stores the kernels h_k as dense symmetric tensors
// over the atom index set.
struct ChaosSeq {
    ChaosMode mode = ChaosMode::Scalar;
    double mu = 1.0;  // total mass mu(R) of the companion measure

    // Scalar mode: coeff[n] = c_n for n = 1..n_cap; coeff[0] = 0.
    std::vector<double> coeff;

    // AtomicTensor mode: tensors[k] is the order-k kernel h_k, so the
    // chaos order runs n = 1..tensors.size().
    std::vector<std::vector<double>> tensors;
    std::vector<double> atom_masses;  // x_i^2 rate_i per atom

    double tail_b = 0.0;  // estimated chaos mass beyond n_cap
    double mean = 0.0;    // E f when built from a payoff
    std::optional<PayoffSpec> payoff;
    bool truncation_warning = false;

    static ChaosSeq scalar(std::vector<double> c, double mu_total) {
        require(mu_total > 0.0, "ChaosSeq: mu must be positive");
        require(!c.empty(), "ChaosSeq: empty coefficient list");
        ChaosSeq out;
        out.mode = ChaosMode::Scalar;
        out.mu = mu_total;
        out.coeff = std::move(c);
        out.coeff[0] = 0.0;  // mean-zero convention
        return out;
    }

    // Scalar sequence from raw kernel values h_0..h_{n_max}.
    static ChaosSeq scalar_from_h(const std::vector<double>& h, double mu_total) {
        require(mu_total > 0.0, "ChaosSeq: mu must be positive");
        std::vector<double> c(h.size() + 1, 0.0);
        for (std::size_t n = 1; n <= h.size(); ++n) {
            if (h[n - 1] == 0.0) continue;
            // Log-domain product: sqrt(n! mu^n) alone overflows long before
            // the orthonormal coefficient h * sqrt(n! mu^n) does.
            const double lg = 0.5 * (detail::log_factorial(n) +
                                     static_cast<double>(n) * std::log(mu_total));
            const double lv = std::log(std::abs(h[n - 1])) + lg;
            c[n] = (h[n - 1] > 0.0 ? 1.0 : -1.0) * std::exp(lv);
            require(std::isfinite(c[n]), "ChaosSeq: raw kernel value overflows");
        }
        return scalar(std::move(c), mu_total);
    }

    static ChaosSeq atomic(std::vector<std::vector<double>> kernels,
                           std::vector<double> masses) {
        require(!masses.empty(), "ChaosSeq: need at least one atom");
        double mu_total = 0.0;
        for (double m : masses) {
            require(m > 0.0, "ChaosSeq: atom masses must be positive");
            mu_total += m;
        }
        ChaosSeq out;
        out.mode = ChaosMode::AtomicTensor;
        out.mu = mu_total;
        out.tensors = std::move(kernels);
        out.atom_masses = std::move(masses);
        std::size_t sz = 1;
        for (std::size_t k = 0; k < out.tensors.size(); ++k) {
            require(out.tensors[k].size() == sz,
                    "ChaosSeq: tensor size must be atoms^order");
            sz *= out.atom_masses.size();
        }
        return out;
    }

    // Highest chaos order with stored data.
    std::size_t n_cap() const {
        return mode == ChaosMode::Scalar ? coeff.size() - 1 : tensors.size();
    }

    double b(std::size_t n) const {
        if (n == 0 || n > n_cap()) return 0.0;
        if (mode == ChaosMode::Scalar) return coeff[n] * coeff[n];
        const double lg = detail::log_factorial(n);
        return std::exp(lg) * mu *
               detail::tensor_norm_sq(tensors[n - 1], n - 1, atom_masses);
    }

    // Raw kernel value h_{n-1} in scalar mode (0 if not representable).
    double h_raw(std::size_t n) const {
        require(mode == ChaosMode::Scalar, "h_raw: scalar mode only");
        if (n == 0 || n > n_cap()) return 0.0;
        const double lg = 0.5 * (detail::log_factorial(n) +
                                 static_cast<double>(n) * std::log(mu));
        const double v = coeff[n] * std::exp(-lg);
        return std::isfinite(v) ? v : 0.0;
    }
};

// b_0..b_{n_cap}; b_0 = 0 by the mean-zero convention.
inline std::vector<double> chaos_norms(const ChaosSeq& c) {
    std::vector<double> b(c.n_cap() + 1, 0.0);
    for (std::size_t n = 1; n < b.size(); ++n) b[n] = c.b(n);
    return b;
}

// ||F||^2 = sum b_n over the truncation.
inline double l2_norm_sq(const ChaosSeq& c) {
    return pairwise_sum(chaos_norms(c));
}

// sum (n+1) b_n over the truncation.
inline double d12_norm_sq(const ChaosSeq& c) {
    std::vector<double> terms(c.n_cap() + 1, 0.0);
    for (std::size_t n = 1; n < terms.size(); ++n)
        terms[n] = static_cast<double>(n + 1) * c.b(n);
    return pairwise_sum(terms);
}

// Convergence diagnostic for sum_n terms[n]: dyadic block sums
// B_j = sum_{2^j <= n < 2^{j+1}} fitted as B_j ~ 2^{rho j}.
struct BlockTrend {
    Verdict verdict = Verdict::Inconclusive;
    double exponent = 0.0;
};

inline BlockTrend block_trend(const std::vector<double>& terms,
                              double tol = 0.02) {
    std::vector<double> lx, ly;
    for (std::size_t j = 2;; ++j) {
        const std::size_t lo = std::size_t(1) << j;
        const std::size_t hi = lo << 1;
        if (hi > terms.size()) break;  // complete blocks only
        double bsum = 0.0;
        for (std::size_t n = lo; n < hi; ++n) bsum += terms[n];
        if (bsum > 0.0) {
            lx.push_back(static_cast<double>(j));
            ly.push_back(std::log2(bsum));
        }
    }
    BlockTrend out;
    if (lx.size() < 3) {
        // Effectively a finite sum: nothing left in the asymptotic range.
        out.verdict = Verdict::Convergent;
        out.exponent = -1.0;
        return out;
    }
    const std::size_t keep = std::min<std::size_t>(lx.size(), 6);
    const std::size_t off = lx.size() - keep;
    out.exponent = ls_slope(std::span(lx).subspan(off), std::span(ly).subspan(off));
    if (out.exponent < -tol)
        out.verdict = Verdict::Convergent;
    else if (out.exponent > tol)
        out.verdict = Verdict::Divergent;
    else
        out.verdict = Verdict::Inconclusive;
    return out;
}

struct WeightedSum {
    double value = 0.0;
    Verdict verdict = Verdict::Convergent;
    double block_exponent = 0.0;
};

// sum (n+1)^theta b_n with a tail-trend verdict; theta = 1 reproduces
// d12_norm_sq.
inline WeightedSum besov_weighted_sum(const ChaosSeq& c, double theta) {
    require(theta > 0.0 && theta <= 1.0, "besov_weighted_sum: theta in (0,1]");
    std::vector<double> terms(c.n_cap() + 1, 0.0);
    for (std::size_t n = 1; n < terms.size(); ++n)
        terms[n] = std::pow(static_cast<double>(n + 1), theta) * c.b(n);
    WeightedSum out;
    out.value = pairwise_sum(terms);
    const BlockTrend bt = block_trend(terms);
    out.verdict = bt.verdict;
    out.block_exponent = bt.exponent;
    return out;
}

// Upper estimate of the K-functional between L2 and the D_{1,2} scale:
// min over split levels m of tail-L2 + u * head-D12.
inline double k_functional_upper(const ChaosSeq& c, double u) {
    require(u > 0.0, "k_functional_upper: u > 0 required");
    const std::vector<double> b = chaos_norms(c);
    const std::size_t n_cap = b.size() - 1;
    std::vector<double> head(n_cap + 1, 0.0);  // sum_{n<=m} (n+1) b_n
    std::vector<double> tail(n_cap + 2, 0.0);  // sum_{n>m} b_n
    for (std::size_t n = 1; n <= n_cap; ++n)
        head[n] = head[n - 1] + static_cast<double>(n + 1) * b[n];
    for (std::size_t n = n_cap; n >= 1; --n) tail[n] = tail[n + 1] + b[n];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= n_cap; ++m) {
        const double v = std::sqrt(std::max(0.0, tail[m + 1])) +
                         u * std::sqrt(head[m]);
        best = std::min(best, v);
    }
    return best;
}

// Kernels g_n of a random variable f(X_1) = E f + sum I_n(g_n) over a
// purely atomic jump measure; g[n-1] is the order-n dense tensor.
struct GkwKernels {
    std::vector<std::vector<double>> g;
    std::vector<double> atom_masses;

    double mu() const {
        double s = 0.0;
        for (double m : atom_masses) s += m;
        return s;
    }

    double b(std::size_t n) const {
        if (n == 0 || n > g.size()) return 0.0;
        return std::exp(detail::log_factorial(n)) *
               detail::tensor_norm_sq(g[n - 1], n, atom_masses);
    }

    double d12_norm_sq() const {
        double s = 0.0;
        for (std::size_t n = 1; n <= g.size(); ++n)
            s += static_cast<double>(n + 1) * b(n);
        return s;
    }
};

// Orthogonal projection onto the stochastic-integral span: contracts the
// last coordinate of each kernel against the normalized measure,
// h_{n-1}(i_1..i_{n-1}) = sum_i g_n(i_1..i_{n-1}, i) m_i / mu.
inline ChaosSeq gkw_project(const GkwKernels& k) {
    const std::size_t a = k.atom_masses.size();
    require(a >= 1, "gkw_project: need atoms");
    const double mu = k.mu();
    require(mu > 0.0, "gkw_project: zero total mass");
    std::vector<std::vector<double>> h(k.g.size());
    std::size_t sz = 1;  // a^(n-1)
    for (std::size_t n = 1; n <= k.g.size(); ++n) {
        require(k.g[n - 1].size() == sz * a, "gkw_project: tensor size mismatch");
        h[n - 1].assign(sz, 0.0);
        for (std::size_t base = 0; base < sz; ++base)
            for (std::size_t i = 0; i < a; ++i)
                h[n - 1][base] += k.g[n - 1][i * sz + base] * k.atom_masses[i] / mu;
        sz *= a;
    }
    return ChaosSeq::atomic(std::move(h), k.atom_masses);
}

// Re-embedding of a projected sequence as kernels of the same orders
// (h_{n-1} tensor 1 in the last coordinate), for idempotence checks.
inline GkwKernels embed_kernels(const ChaosSeq& c) {
    require(c.mode == ChaosMode::AtomicTensor, "embed_kernels: tensor mode only");
    const std::size_t a = c.atom_masses.size();
    GkwKernels out;
    out.atom_masses = c.atom_masses;
    out.g.resize(c.tensors.size());
    for (std::size_t n = 1; n <= c.tensors.size(); ++n) {
        const auto& h = c.tensors[n - 1];
        out.g[n - 1].resize(h.size() * a);
        for (std::size_t i = 0; i < a; ++i)
            for (std::size_t base = 0; base < h.size(); ++base)
                out.g[n - 1][i * h.size() + base] = h[base];
    }
    return out;
}

inline std::vector<double> symmetrize_tensor(const std::vector<double>& t,
                                             std::size_t order, std::size_t atoms) {
    return detail::tensor_symmetrize(t, order, atoms);
}

}  // namespace levyapprox
