#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include "levyapprox/chaos_build.hpp"
#include "levyapprox/io.hpp"

using namespace levyapprox;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Runs the command-line tool (path from the build system via environment)
// inside a scratch directory; returns the exit code.
struct Cli {
    std::string exe;
    std::string dir;

    Cli() {
        const char* env = std::getenv("LEVYAPPROX_CLI");
        exe = env ? env : "";
        dir = "cli_scratch";
        const int rc = std::system(("mkdir -p " + dir).c_str());
        REQUIRE(rc == 0);
    }

    int run(const std::string& args) const {
        const std::string cmd =
            "cd " + dir + " && " + exe + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }

    std::string path(const std::string& name) const { return dir + "/" + name; }
};

}  // namespace

TEST_CASE("coefficient JSON round trip keeps the orthonormal values") {
    ChaosSeq dig = gaussian_chaos(Digital{0.0}, 1.0, 512);
    const json j = chaos_to_json(dig);
    REQUIRE(j.at("mode") == "scalar");
    REQUIRE(j.at("n_max").get<std::size_t>() == dig.n_cap() - 1);
    const ChaosSeq back = chaos_from_json(j);
    REQUIRE(back.n_cap() == dig.n_cap());
    for (std::size_t n = 1; n <= dig.n_cap(); ++n)
        REQUIRE(back.coeff[n] == dig.coeff[n]);
    REQUIRE(back.tail_b == dig.tail_b);
    REQUIRE(back.mean == dig.mean);
    REQUIRE(back.payoff.has_value());

    // Without the orthonormal block, the raw kernels reconstruct the low
    // orders; underflowed entries load as zero rather than garbage.
    json raw = j;
    raw.erase("coeff");
    const ChaosSeq from_h = chaos_from_json(raw);
    for (std::size_t n = 1; n <= 20; ++n)
        REQUIRE(from_h.coeff[n] == Catch::Approx(dig.coeff[n]).margin(1e-12));
}

TEST_CASE("tensor-mode JSON round trip") {
    ChaosSeq atomic = ChaosSeq::atomic({{0.5}, {0.1, -0.2}}, {0.25, 0.75});
    const ChaosSeq back = chaos_from_json(chaos_to_json(atomic));
    REQUIRE(back.mode == ChaosMode::AtomicTensor);
    REQUIRE(back.tensors == atomic.tensors);
    REQUIRE(back.atom_masses == atomic.atom_masses);
}

TEST_CASE("CSV exports carry headers") {
    const TimeNet net = TimeNet::equidistant(2);
    const std::string csv = net_csv(net);
    REQUIRE(csv.rfind("k,t\n", 0) == 0);
    REQUIRE(csv.find("2,1") != std::string::npos);

    ChaosSeq q = ChaosSeq::scalar({0.0, 0.0, std::sqrt(2.0)}, 1.0);
    REQUIRE(coeff_csv(q).rfind("n,h,b_n\n", 0) == 0);

    RateTable t;
    t.rows.push_back({4, 0.5});
    REQUIRE(rate_csv(t) == "N,a_x_opt\n4,0.5\n");
}

TEST_CASE("command-line tool end to end") {
    Cli cli;
    REQUIRE_FALSE(cli.exe.empty());

    write_text_file(cli.path("gauss.json"),
                    R"({"sigma":1.0,"jumps":{"type":"none"}})");
    write_text_file(cli.path("atom.json"),
                    R"({"sigma":0.0,"jumps":{"type":"atoms",)"
                    R"("atoms":[{"x":1.0,"rate":1.0}]}})");
    write_text_file(cli.path("mixed.json"),
                    R"({"sigma":1.0,"jumps":{"type":"atoms",)"
                    R"("atoms":[{"x":1.0,"rate":1.0}]}})");

    SECTION("net generation and argument validation") {
        REQUIRE(cli.run("nets --N 4 --theta 1 --out n4") == 0);
        REQUIRE(slurp(cli.path("n4.csv")) ==
                "k,t\n0,0\n1,0.25\n2,0.5\n3,0.75\n4,1\n");
        REQUIRE(cli.run("nets --N 0") == 2);
        REQUIRE(cli.run("nets --N 4 --theta 2") == 2);
        REQUIRE(cli.run("nosuchcommand") == 2);
    }

    SECTION("coefficients, exact errors, and reruns are byte-identical") {
        REQUIRE(cli.run("coeffs --model gauss.json --payoff digital --K 0 "
                        "--nmax 512 --out dig") == 0);
        const json cj = json::parse(slurp(cli.path("dig.json")));
        REQUIRE(cj.at("parseval_residual").get<double>() < 1e-8);

        // Mixed diffusion + jumps: declared unsupported.
        REQUIRE(cli.run("coeffs --model mixed.json --payoff digital --K 0") ==
                3);

        // Linear payoff: a single first-order coefficient.
        REQUIRE(cli.run("coeffs --model atom.json --payoff poly "
                        "--poly-coeffs 0 1 --nmax 16 --out lin") == 0);
        const json lj = json::parse(slurp(cli.path("lin.json")));
        REQUIRE(lj.at("n_max").get<std::size_t>() == 0);

        REQUIRE(cli.run("error-exact --coeffs dig.json --N 8 --theta 0.5 "
                        "--process x --out ee") == 0);
        const json ej = json::parse(slurp(cli.path("ee.json")));
        REQUIRE(ej.at("a_x_opt").get<double>() > 0.0);
        const std::string first = slurp(cli.path("ee.json"));
        REQUIRE(cli.run("error-exact --coeffs dig.json --N 8 --theta 0.5 "
                        "--process x --out ee") == 0);
        REQUIRE(slurp(cli.path("ee.json")) == first);

        REQUIRE(cli.run("rate-sweep --coeffs dig.json --theta 1 --n-min 4 "
                        "--n-max 64 --out rs") == 0);
        REQUIRE(slurp(cli.path("rs.csv")).rfind("N,a_x_opt\n", 0) == 0);

        REQUIRE(cli.run("smoothness --coeffs dig.json --theta 0.4 --out sm") ==
                0);
        const json sj = json::parse(slurp(cli.path("sm.json")));
        REQUIRE(sj.at("criteria").at("weighted_curvature_integral")
                    .at("verdict") == "convergent");

        REQUIRE(cli.run("report --coeffs dig.json --theta 1 --n-min 4 "
                        "--n-max 64 --out rp") == 0);
        const json rj = json::parse(slurp(cli.path("rp.json")));
        REQUIRE(rj.at("slope").get<double>() < 0.0);
        REQUIRE(rj.contains("limit_constant"));
    }

    SECTION("Monte Carlo commands and manifests") {
        REQUIRE(cli.run("coeffs --model atom.json --payoff poly "
                        "--poly-coeffs 0 -1 1 --nmax 32 --out pq") == 0);
        REQUIRE(cli.run("error-mc --model atom.json --coeffs pq.json --N 4 "
                        "--process s --paths 5000 --seed 11 --out mc") == 0);
        const json mj = json::parse(slurp(cli.path("mc.json")));
        REQUIRE(mj.at("method") == "simple");
        REQUIRE(mj.at("paths").get<std::size_t>() == 5000);
        const std::string first = slurp(cli.path("mc.json"));
        REQUIRE(cli.run("error-mc --model atom.json --coeffs pq.json --N 4 "
                        "--process s --paths 5000 --seed 11 --out mc") == 0);
        REQUIRE(slurp(cli.path("mc.json")) == first);

        // The manifest lists both outputs with digests.
        const json man = json::parse(slurp(cli.path("mc_manifest.json")));
        REQUIRE(man.at("command") == "error-mc");
        REQUIRE(man.at("outputs").size() == 1);
        for (const auto& o : man.at("outputs"))
            REQUIRE(o.at("digest").get<std::string>().size() == 16);

        REQUIRE(cli.run("psi --model gauss.json --delta 0.1 --paths 2000 "
                        "--seed 5 --out ps") == 0);
        const json pj = json::parse(slurp(cli.path("ps.json")));
        REQUIRE(pj.at("value").get<double>() > 0.0);
        REQUIRE(pj.at("value").get<double>() < 1.0);

        // Invalid model file content is an input error.
        write_text_file(cli.path("bad.json"), "{");
        REQUIRE(cli.run("psi --model bad.json --delta 0.1") == 2);
    }
}
