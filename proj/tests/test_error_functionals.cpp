#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "levyapprox/chaos_build.hpp"
#include "levyapprox/error_functionals.hpp"

using namespace levyapprox;

namespace {

ChaosSeq random_scalar(std::mt19937_64& gen, std::size_t n_max = 20,
                       double mu = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> c(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) c[n] = 0.3 * g(gen);
    return ChaosSeq::scalar(std::move(c), mu);
}

TimeNet random_net(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts{0.0, 1.0};
    const int k = 1 + static_cast<int>(gen() % 6);
    for (int i = 0; i < k; ++i) pts.push_back(u(gen));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return TimeNet(std::move(pts));
}

}  // namespace

TEST_CASE("generating function and its derivatives") {
    // b = (0, 1, 2): T(t) = t + 2 t^2, T' = 1 + 4t, T'' = 4.
    const std::vector<double> b{0.0, 1.0, 2.0};
    REQUIRE(T_eval(b, 0.3, 0) == Catch::Approx(0.3 + 2 * 0.09).margin(1e-14));
    REQUIRE(T_eval(b, 0.3, 1) == Catch::Approx(1.0 + 4 * 0.3).margin(1e-14));
    REQUIRE(T_eval(b, 0.3, 2) == Catch::Approx(4.0).margin(1e-14));
    REQUIRE(T_eval(b, 0.0, 0) == 0.0);
}

TEST_CASE("exact error on a net: closed forms") {
    // Quadratic payoff b = (0,0,2): a^2 = 2/N on equidistant nets.
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    for (std::size_t N : {1, 2, 16, 1024}) {
        const double a = a_x_opt_exact(q, TimeNet::equidistant(N));
        REQUIRE(a == Catch::Approx(std::sqrt(2.0 / N)).epsilon(1e-12));
    }
    // One interval (0,1): a^2 = sum_{n>=2} b_n.
    ChaosSeq m = ChaosSeq::scalar({0.0, 0.5, 0.7, 0.3}, 2.0);
    const double a1 = a_x_opt_exact(m, TimeNet(std::vector<double>{0.0, 1.0}));
    REQUIRE(a1 * a1 == Catch::Approx(0.49 + 0.09).epsilon(1e-12));
    // Pure first chaos is approximated exactly.
    ChaosSeq lin = ChaosSeq::scalar({0.0, 1.0}, 1.0);
    REQUIRE(a_x_opt_exact(lin, TimeNet::equidistant(3)) ==
            Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("exact error routes agree on random inputs") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 100; ++trial) {
        const ChaosSeq c = random_scalar(gen, 20, 0.5 + 2.0 * (trial % 3));
        const TimeNet net = random_net(gen);
        const double direct = a_x_opt_exact(c, net);
        const double bregman = A_functional(chaos_norms(c), net);
        REQUIRE(direct == Catch::Approx(bregman).epsilon(1e-10).margin(1e-13));
    }
}

TEST_CASE("curvature functions") {
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    // H_X^2 = T'' = 4; the exponential counterpart picks up drift: 4 + 4t.
    REQUIRE(H_sq(q, 0.3, Process::X) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(H_sq(q, 0.3, Process::S) == Catch::Approx(5.2).margin(1e-12));

    // H_X^2 equals T'' at random coefficients and times.
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(0.0, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        const ChaosSeq c = random_scalar(gen, 12, 1.4);
        const auto b = chaos_norms(c);
        for (int i = 0; i < 20; ++i) {
            const double t = u(gen);
            REQUIRE(H_sq(c, t, Process::X) ==
                    Catch::Approx(T_eval(b, t, 2)).epsilon(1e-10).margin(1e-12));
        }
    }

    // Raw kernels h_{n-1} = h_0/n! make the exponential curvature vanish:
    // the payoff is affine in S.
    // (Truncation leaves one boundary term of size ~ h_0^2 n / n!, so the
    // order must be deep enough for the cancellation to show.)
    std::vector<double> h(24);
    h[0] = 0.7;
    for (std::size_t n = 2; n <= h.size(); ++n)
        h[n - 1] = h[n - 2] / static_cast<double>(n);
    ChaosSeq aff = ChaosSeq::scalar_from_h(h, 1.0);
    for (double t : {0.0, 0.3, 0.8})
        REQUIRE(H_sq(aff, t, Process::S) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("two-sided enclosure of the simple exponential-mode error") {
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    const Bracket br = a_s_sim_bracket(q, TimeNet::equidistant(4));
    // v^2 = int (t_k - t) H_S^2 dt summed = known closed form.
    REQUIRE(br.v == Catch::Approx(0.8539125638).epsilon(1e-9));
    REQUIRE(br.constant == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(br.low == Catch::Approx(br.v / 2.0).epsilon(1e-12));
    REQUIRE(br.high == Catch::Approx(br.v * 2.0).epsilon(1e-12));
    // Mesh too coarse: |tau| mu >= 1 has no enclosure constant.
    REQUIRE_THROWS_AS(a_s_sim_bracket(q, TimeNet(std::vector<double>{0.0, 1.0})),
                      invalid_input);
}

TEST_CASE("gap bound shrinks with refinement") {
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t N = 1; N <= 256; N *= 2) {
        const double g = gap_bound(q, TimeNet::equidistant(N));
        REQUIRE(g >= 0.0);
        REQUIRE(g <= prev + 1e-12);
        prev = g;
    }
}

TEST_CASE("pointwise curvature gap bound") {
    ChaosSeq dig = gaussian_chaos(Digital{0.0}, 1.0, 1024);
    const auto bx = h_series(dig, Process::X);
    const auto bs = h_series(dig, Process::S);
    for (double t = 0.05; t < 0.95; t += 0.05) {
        const double hx = std::sqrt(std::max(0.0, H_sq(dig, t, Process::X)));
        const double hs = std::sqrt(std::max(0.0, H_sq(dig, t, Process::S)));
        REQUIRE(std::abs(hs - hx) <= h_gap_bound(dig, t) + 1e-10);
    }
    // The bound itself is sqrt(mu T'(t)).
    const auto b = chaos_norms(dig);
    REQUIRE(h_gap_bound(dig, 0.5) ==
            Catch::Approx(std::sqrt(dig.mu * T_eval(b, 0.5, 1))).epsilon(1e-12));
}

TEST_CASE("scaled-error limit on concentrated nets") {
    // Quadratic, theta = 1: N a^2 -> 2 exactly.
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    const LimitConstant lq = limit_constant(q, 1.0, Process::X);
    REQUIRE(lq.value == Catch::Approx(2.0).epsilon(1e-10));
    REQUIRE(lq.verdict != Verdict::Divergent);

    // Pure first chaos: limit 0.
    ChaosSeq lin = ChaosSeq::scalar({0.0, 1.0}, 1.0);
    REQUIRE(limit_constant(lin, 1.0, Process::X).value ==
            Catch::Approx(0.0).margin(1e-14));

    // Digital at theta = 1/2: frozen series value, matched by N a^2 at
    // N = 1024 to about half a percent.
    ChaosSeq dig = gaussian_chaos(Digital{0.0}, 1.0, 4096);
    const LimitConstant ld = limit_constant(dig, 0.5, Process::X);
    REQUIRE(ld.value == Catch::Approx(0.43718527).epsilon(1e-6));
    const double a = a_x_opt_exact(dig, TimeNet::theta(1024, 0.5));
    REQUIRE(1024.0 * a * a == Catch::Approx(ld.value).epsilon(0.02));
}

TEST_CASE("rate sweep slopes") {
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    std::vector<std::size_t> Ns;
    for (std::size_t N = 4; N <= 1024; N *= 2) Ns.push_back(N);
    const RateTable t = rate_sweep(q, 1.0, Ns);
    REQUIRE(t.slope == Catch::Approx(-0.5).margin(1e-6));
    REQUIRE(t.rows.size() == 9);
    REQUIRE(t.rows.front().N == 4);

    // Digital on equidistant nets: the known slow rate, about N^{-1/4}.
    ChaosSeq dig = gaussian_chaos(Digital{0.0}, 1.0, 4096);
    const RateTable td = rate_sweep(dig, 1.0, Ns);
    REQUIRE(td.slope > -0.27);
    REQUIRE(td.slope < -0.23);
}

TEST_CASE("smoothness verdicts for the digital payoff") {
    ChaosSeq dig = gaussian_chaos(Digital{0.0}, 1.0, 4096);
    // Below the critical index 1/2 the weighted curvature integral is
    // finite, above it diverges.
    REQUIRE(smoothness_criteria(dig, 0.4).beta_series == Verdict::Convergent);
    REQUIRE(smoothness_criteria(dig, 0.8).beta_series == Verdict::Divergent);
    // Both curvature profiles are integrable in t.
    const SmoothnessCriteria sc = smoothness_criteria(dig, 0.5);
    REQUIRE(sc.h_x_integral == Verdict::Convergent);
    REQUIRE(sc.h_s_integral == Verdict::Convergent);
}

TEST_CASE("refinement never hurts the exact error") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 100; ++trial) {
        const ChaosSeq c = random_scalar(gen, 15, 1.1);
        const TimeNet net = random_net(gen);
        const std::size_t N = 2 + gen() % 12;
        const double before = a_x_opt_exact(c, net);
        const double after = a_x_opt_exact(c, net.refine_union(N));
        REQUIRE(after <= before + 1e-12);
    }
}

TEST_CASE("error report composition") {
    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    const ErrorReport rep =
        make_error_report(q, TimeNet::equidistant(4), 1.0, Process::S);
    REQUIRE(rep.net_points.size() == 5);
    REQUIRE(rep.a_x_opt == Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));
    REQUIRE(rep.a_s_sim_bracket.has_value());
    REQUIRE(rep.limit_constant_theta.has_value());
    REQUIRE(rep.gap_bound > 0.0);
    // One coarse interval: the bracket is dropped but the rest survives.
    const ErrorReport coarse = make_error_report(
        q, TimeNet(std::vector<double>{0.0, 1.0}), std::nullopt, Process::X);
    REQUIRE_FALSE(coarse.a_s_sim_bracket.has_value());
    REQUIRE_FALSE(coarse.limit_constant_theta.has_value());
}
