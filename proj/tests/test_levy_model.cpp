#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyapprox/io.hpp"
#include "levyapprox/levy_model.hpp"
#include "levyapprox/smoothness.hpp"

using namespace levyapprox;

namespace {
double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}
}  // namespace

TEST_CASE("second-moment mass: Gaussian-only model") {
    LevyModel m(2.0, NoJumps{});
    REQUIRE(mu_total(m) == Catch::Approx(4.0).epsilon(0.0));
}

TEST_CASE("second-moment mass: atoms add x^2 * rate") {
    LevyModel m(1.0, Atoms{{{0.5, 2.0}, {-1.0, 3.0}}});
    // 1 + 0.25*2 + 1*3
    REQUIRE(mu_total(m) == Catch::Approx(4.5).margin(1e-14));
}

TEST_CASE("second-moment mass: tempered stable matches the Beta closed form") {
    // int |x|^2 nu = 2 d B(2 - alpha, m - 2 + alpha)
    LevyModel m(0.0, TemperedStable{1.0, 0.5, 2.0, 0.1});
    const double exact = 2.0 * beta_fn(1.5, 0.5);
    REQUIRE(mu_total(m) == Catch::Approx(exact).epsilon(1e-8));
}

TEST_CASE("absolute moments of the jump measure") {
    LevyModel atoms(0.0, Atoms{{{0.5, 2.0}, {-1.0, 3.0}}});
    auto m1 = nu_moment(atoms, 1.0);
    REQUIRE(m1.has_value());
    REQUIRE(*m1 == Catch::Approx(0.5 * 2.0 + 1.0 * 3.0).margin(1e-14));

    // Tempered stable p = 3/2 with alpha = 1/2, m = 2: 2 d B(1, 1) = 2
    LevyModel ts(0.0, TemperedStable{1.0, 0.5, 2.0, 0.1});
    auto m32 = nu_moment(ts, 1.5);
    REQUIRE(m32.has_value());
    REQUIRE(*m32 == Catch::Approx(2.0).epsilon(1e-6));

    // p = 1/2 < alpha = 1.4: small jumps make the moment infinite.
    LevyModel heavy(0.0, TemperedStable{1.0, 1.4, 1.0, 0.1});
    REQUIRE_FALSE(nu_moment(heavy, 0.5).has_value());
    // p = 3 >= alpha + m = 2.4: large jumps diverge.
    REQUIRE_FALSE(nu_moment(heavy, 3.0).has_value());
}

TEST_CASE("exponential positivity requires jumps > -1") {
    REQUIRE(check_exponential_positive(LevyModel(1.0, NoJumps{})));
    REQUIRE(check_exponential_positive(LevyModel(0.0, Atoms{{{-0.5, 1.0}}})));
    REQUIRE_FALSE(check_exponential_positive(LevyModel(0.0, Atoms{{{-1.0, 1.0}}})));
    REQUIRE_FALSE(check_exponential_positive(LevyModel(0.0, Atoms{{{-2.0, 1.0}}})));
    // Two-sided tempered stable always charges (-inf, -1].
    REQUIRE_FALSE(check_exponential_positive(
        LevyModel(0.0, TemperedStable{1.0, 0.5, 3.0, 0.1})));
}

TEST_CASE("model validation") {
    REQUIRE_THROWS_AS(LevyModel(0.0, NoJumps{}), numeric_failure);  // zero mass
    REQUIRE_THROWS_AS(LevyModel(0.0, Atoms{{{0.0, 1.0}}}), invalid_input);
    REQUIRE_THROWS_AS(LevyModel(0.0, Atoms{{{1.0, -1.0}}}), invalid_input);
    REQUIRE_THROWS_AS(LevyModel(0.0, Atoms{{{1.0, 1.0}, {1.0, 2.0}}}),
                      invalid_input);  // duplicate atom
    REQUIRE_THROWS_AS(LevyModel(0.0, TemperedStable{1.0, 2.5, 2.0, 0.1}),
                      invalid_input);  // alpha outside (0,2)
    REQUIRE_THROWS_AS(LevyModel(0.0, TemperedStable{1.0, 0.5, 1.0, 0.1}),
                      invalid_input);  // m <= 2 - alpha: infinite variance
}

TEST_CASE("model JSON round trip") {
    const LevyModel models[] = {
        LevyModel(1.5, NoJumps{}),
        LevyModel(0.0, Atoms{{{0.5, 2.0}, {-0.25, 1.0}}}),
        LevyModel(0.5, TemperedStable{1.0, 0.5, 2.0, 0.05}),
    };
    for (const auto& m : models) {
        const LevyModel back = model_from_json(model_to_json(m));
        REQUIRE(back.sigma() == m.sigma());
        REQUIRE(mu_total(back) == Catch::Approx(mu_total(m)).epsilon(1e-14));
        REQUIRE(model_to_json(back) == model_to_json(m));
    }
    REQUIRE_THROWS_AS(model_from_json(json{{"sigma", 1.0}}), invalid_input);
}

TEST_CASE("density-smoothness bound report") {
    // Single atom x = 1, rate 1: the total-mass alternative is nu(R) = 1.
    LevyModel atom(0.0, Atoms{{{1.0, 1.0}}});
    const SmoothnessBounds sb = smoothness_bounds(atom, 1.0, 0.5);
    REQUIRE(sb.total_mass_bound.has_value());
    REQUIRE(*sb.total_mass_bound == Catch::Approx(1.0).margin(1e-14));
    REQUIRE_FALSE(sb.psi_cap_fitted);

    // eps small enough switches the linear-cap alternative from
    // eps^{-1} int x^2 nu over to 9 c int |x| nu.
    const SmoothnessBounds tight = smoothness_bounds(atom, 1e-3, 0.5);
    REQUIRE(tight.linear_psi_bound.has_value());
    REQUIRE(*tight.linear_psi_bound ==
            Catch::Approx(9.0 * 0.5 * 1.0).margin(1e-10));

    // Tempered stable, sigma = 0: the 3/2-moment bound is
    // (c/2) (int |x|^{3/2} nu)^2 with the moment equal to 2 exactly.
    LevyModel ts(0.0, TemperedStable{1.0, 0.5, 2.0, 0.1});
    const SmoothnessBounds tb = smoothness_bounds(ts, 0.5, 0.7);
    REQUIRE(tb.three_halves_bound.has_value());
    REQUIRE(*tb.three_halves_bound == Catch::Approx(0.5 * 0.7 * 4.0).epsilon(1e-5));
    // nu(R) is infinite for the tempered stable family: inapplicable.
    REQUIRE_FALSE(tb.total_mass_bound.has_value());
}
