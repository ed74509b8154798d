#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "levyapprox/common.hpp"
#include "levyapprox/quadrature.hpp"

namespace levyapprox {

struct NoJumps {};

struct Atom {
    double x = 0.0;     // jump size, nonzero
    double rate = 0.0;  // nu({x}), positive
};

struct Atoms {
    std::vector<Atom> atoms;
};

// nu_alpha(dx) = d |x|^{-1-alpha} (1+|x|)^{-m} dx, symmetric two-sided.
struct TemperedStable {
    double d = 1.0;
    double alpha = 0.5;      // in (0,2); Blumenthal-Getoor index
    double m = 2.0;          // > 2 - alpha, keeps the second moment finite
    double eps_trunc = 0.1;  // small-jump truncation level in (0,1]
};

using JumpSpec = std::variant<NoJumps, Atoms, TemperedStable>;

class LevyModel;
double mu_total(const LevyModel& model);

// Square-integrable mean-zero Levy process (sigma, nu) on [0,1].
class LevyModel {
public:
    LevyModel(double sigma, JumpSpec jumps)
        : sigma_(sigma), jumps_(std::move(jumps)) {
        require(sigma_ >= 0.0, "LevyModel: sigma must be nonnegative");
        if (const auto* a = std::get_if<Atoms>(&jumps_)) {
            for (std::size_t i = 0; i < a->atoms.size(); ++i) {
                require(a->atoms[i].x != 0.0, "Atoms: jump sizes must be nonzero");
                require(a->atoms[i].rate > 0.0, "Atoms: rates must be positive");
                for (std::size_t j = 0; j < i; ++j)
                    require(a->atoms[j].x != a->atoms[i].x,
                            "Atoms: jump sizes must be distinct");
            }
        }
        if (const auto* ts = std::get_if<TemperedStable>(&jumps_)) {
            require(ts->d > 0.0, "TemperedStable: d must be positive");
            require(ts->alpha > 0.0 && ts->alpha < 2.0,
                    "TemperedStable: alpha in (0,2) required");
            require(ts->m > 2.0 - ts->alpha,
                    "TemperedStable: m > 2 - alpha required");
            require(ts->eps_trunc > 0.0 && ts->eps_trunc <= 1.0,
                    "TemperedStable: eps_trunc in (0,1] required");
        }
        if (mu_total(*this) <= 0.0)
            throw numeric_failure("ZeroMass: mu(R) = 0 is excluded");
    }

    double sigma() const { return sigma_; }
    const JumpSpec& jumps() const { return jumps_; }

    bool gaussian_only() const { return std::holds_alternative<NoJumps>(jumps_); }
    const Atoms* atoms() const { return std::get_if<Atoms>(&jumps_); }
    const TemperedStable* tempered_stable() const {
        return std::get_if<TemperedStable>(&jumps_);
    }
    bool single_atom() const {
        const auto* a = atoms();
        return a && a->atoms.size() == 1;
    }

private:
    double sigma_;
    JumpSpec jumps_;
};

namespace detail {

// integral_{lo < |x| < hi} |x|^p nu_alpha(dx), both sides.
inline double ts_partial_moment(const TemperedStable& ts, double p, double lo,
                                double hi) {
    auto g = [&](double x) {
        return 2.0 * ts.d * std::pow(x, p - 1.0 - ts.alpha) *
               std::pow(1.0 + x, -ts.m);
    };
    if (std::isinf(hi)) {
        if (lo <= 0.0) {
            return integrate(g, 0.0, 1.0) + integrate_upper(g, 1.0);
        }
        return integrate_upper(g, lo);
    }
    return integrate(g, lo, hi);
}

}  // namespace detail

// integral |x|^p nu(dx); nullopt marks divergence (origin or tail test).
inline std::optional<double> nu_moment(const LevyModel& model, double p) {
    require(p >= 0.0, "nu_moment: p >= 0 required");
    if (model.gaussian_only()) return 0.0;
    if (const auto* a = model.atoms()) {
        double s = 0.0;
        for (const auto& atom : a->atoms)
            s += atom.rate * std::pow(std::abs(atom.x), p);
        return s;
    }
    const auto& ts = *model.tempered_stable();
    // Near 0 the integrand behaves like |x|^{p-1-alpha}, in the tail like
    // |x|^{p-1-alpha-m}.
    if (p <= ts.alpha) return std::nullopt;
    if (p >= ts.alpha + ts.m) return std::nullopt;
    return detail::ts_partial_moment(ts, p, 0.0,
                                     std::numeric_limits<double>::infinity());
}

// mu(R) = sigma^2 + integral x^2 nu(dx).
inline double mu_total(const LevyModel& model) {
    const auto second = nu_moment(model, 2.0);
    if (!second) throw numeric_failure("mu_total: second jump moment diverges");
    return model.sigma() * model.sigma() + *second;
}

// nu(R) when finite (finite activity), nullopt otherwise.
inline std::optional<double> nu_total(const LevyModel& model) {
    return nu_moment(model, 0.0);
}

// true iff nu((-inf,-1]) = 0, the condition making the stochastic
// exponential strictly positive.
inline bool check_exponential_positive(const LevyModel& model) {
    if (model.gaussian_only()) return true;
    if (const auto* a = model.atoms()) {
        for (const auto& atom : a->atoms)
            if (atom.x <= -1.0) return false;
        return true;
    }
    return false;  // tempered stable density charges (-inf,-1]
}

// integral x nu(dx) restricted to |x| > lo (the compensator drift of the
// finite-activity part). Zero by symmetry for tempered stable.
inline double compensator_drift(const LevyModel& model, double lo = 0.0) {
    if (const auto* a = model.atoms()) {
        double s = 0.0;
        for (const auto& atom : a->atoms)
            if (std::abs(atom.x) > lo) s += atom.rate * atom.x;
        return s;
    }
    return 0.0;
}

}  // namespace levyapprox
