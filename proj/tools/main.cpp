// Command-line front end: builds coefficient files, time-nets, exact and
// Monte Carlo discretization-error reports, and density/smoothness
// diagnostics from a Levy model description. Every run writes a manifest
// with content digests so reruns can be checked for byte identity.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levyapprox/io.hpp"
#include "levyapprox/levyapprox.hpp"

namespace la = levyapprox;
using la::json;

namespace {

la::TimeNet net_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw la::invalid_input("cannot open net file: " + path);
    std::string line;
    std::vector<double> pts;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("t") != std::string::npos &&
                line.find_first_of("0123456789") == std::string::npos)
                continue;  // header row
        }
        const auto comma = line.rfind(',');
        const std::string cell =
            comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            pts.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw la::invalid_input("net CSV: bad value '" + cell + "'");
        }
    }
    return la::TimeNet(pts);
}

// Shared options describing a net: either an explicit CSV file or (N, theta).
struct NetArgs {
    std::string file;
    std::size_t N = 0;
    double theta = 1.0;

    void attach(CLI::App* cmd, bool require_n = false) {
        cmd->add_option("--net", file, "time-net CSV file (column t)");
        auto* n = cmd->add_option("--N", N, "number of intervals");
        cmd->add_option("--theta", theta, "net concentration parameter");
        if (require_n) n->required();
    }

    la::TimeNet resolve() const {
        if (!file.empty()) return net_from_csv(file);
        if (N == 0) throw la::invalid_input("need --net file or --N >= 1");
        return la::TimeNet::theta(N, theta);
    }
};

std::vector<std::size_t> dyadic_sizes(std::size_t n_min, std::size_t n_max) {
    if (n_min == 0 || n_max < n_min)
        throw la::invalid_input("need 1 <= n-min <= n-max");
    std::vector<std::size_t> Ns;
    for (std::size_t N = n_min; N <= n_max; N *= 2) Ns.push_back(N);
    return Ns;
}

json verdict_json(la::Verdict v, double exponent) {
    return {{"verdict", la::verdict_name(v)}, {"block_exponent", exponent}};
}

json criteria_json(const la::SmoothnessCriteria& sc) {
    json j;
    j["weighted_curvature_integral"] =
        verdict_json(sc.beta_series, sc.beta_exponent);
    j["h_x_integral"] = la::verdict_name(sc.h_x_integral);
    j["h_s_integral"] = la::verdict_name(sc.h_s_integral);
    return j;
}

void emit(const std::string& path, const json& j,
          la::RunManifest& manifest) {
    la::write_text_file(path, j.dump(2) + "\n");
    manifest.outputs.push_back(path);
}

void emit_text(const std::string& path, const std::string& body,
               la::RunManifest& manifest) {
    la::write_text_file(path, body);
    manifest.outputs.push_back(path);
}

int run(int argc, char** argv) {
    CLI::App app{"L2 discretization errors of Riemann approximations for "
                 "Levy-driven stochastic integrals"};
    app.require_subcommand(1);

    std::string model_path;
    std::string coeffs_path;
    std::string out_prefix;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "model JSON file");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--out", out_prefix, "output path prefix");
    };
    auto load_model = [&]() {
        if (model_path.empty()) throw la::invalid_input("--model is required");
        return la::model_from_file(model_path);
    };
    auto load_coeffs = [&]() {
        if (coeffs_path.empty())
            throw la::invalid_input("--coeffs is required");
        return la::chaos_from_file(coeffs_path);
    };
    auto manifest_for = [&](const std::string& command) {
        la::RunManifest m;
        m.command = command;
        m.seed = seed;
        if (!model_path.empty()) m.inputs["model"] = model_path;
        if (!coeffs_path.empty()) m.inputs["coeffs"] = coeffs_path;
        return m;
    };

    // ---- nets ----
    auto* cmd_nets = app.add_subcommand("nets", "generate a time-net");
    NetArgs nets_net;
    bool nets_optimize = false;
    nets_net.attach(cmd_nets, /*require_n=*/true);
    cmd_nets->add_flag("--optimize", nets_optimize,
                       "minimize the exact error instead of the theta shape");
    cmd_nets->add_option("--coeffs", coeffs_path,
                         "coefficient JSON (needed with --optimize)");
    add_common(cmd_nets);
    cmd_nets->callback([&]() {
        if (nets_net.N == 0) throw la::invalid_input("nets: --N >= 1 required");
        la::TimeNet net = la::TimeNet::theta(nets_net.N, nets_net.theta);
        if (nets_optimize) {
            const la::ChaosSeq c = load_coeffs();
            net = la::optimize_net(la::chaos_norms(c), nets_net.N,
                                   10 * nets_net.N);
        }
        const std::string prefix = out_prefix.empty() ? "net" : out_prefix;
        auto manifest = manifest_for("nets");
        manifest.inputs["N"] = nets_net.N;
        manifest.inputs["theta"] = nets_net.theta;
        manifest.inputs["optimize"] = nets_optimize;
        emit_text(prefix + ".csv", la::net_csv(net), manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- coeffs ----
    auto* cmd_coeffs =
        app.add_subcommand("coeffs", "chaos coefficients of a payoff");
    std::string payoff_type = "digital";
    double payoff_K = 0.0;
    double payoff_eps = 0.1;
    std::vector<double> poly_coeffs;
    std::size_t nmax = 256;
    cmd_coeffs->add_option("--payoff", payoff_type,
                           "digital | mollified | poly");
    cmd_coeffs->add_option("--K", payoff_K, "payoff threshold");
    cmd_coeffs->add_option("--eps", payoff_eps, "mollifier width");
    cmd_coeffs->add_option("--poly-coeffs", poly_coeffs,
                           "polynomial coefficients, constant term first");
    cmd_coeffs->add_option("--nmax", nmax, "chaos truncation cap");
    add_common(cmd_coeffs);
    cmd_coeffs->callback([&]() {
        const la::LevyModel model = load_model();
        la::PayoffSpec payoff;
        if (payoff_type == "digital") {
            payoff = la::Digital{payoff_K};
        } else if (payoff_type == "mollified") {
            payoff = la::MollifiedDigital{payoff_K, payoff_eps};
        } else if (payoff_type == "poly") {
            if (poly_coeffs.empty())
                throw la::invalid_input("poly payoff needs --poly-coeffs");
            payoff = la::Polynomial{poly_coeffs};
        } else {
            throw la::invalid_input("unknown payoff type: " + payoff_type);
        }
        la::ChaosSeq c;
        if (model.gaussian_only()) {
            c = la::gaussian_chaos(payoff, model.sigma(), nmax);
        } else if (model.single_atom() && model.sigma() == 0.0) {
            const auto& atom = model.atoms()->atoms.front();
            c = la::poisson_chaos(payoff, atom.x, atom.rate, nmax);
        } else {
            throw la::unsupported_model(
                "coeffs: closed-form chaos coefficients exist only for the "
                "Gaussian-only and single-atom models");
        }
        // Parseval check: recompute the payoff variance independently and
        // compare against the stored chaos mass plus recorded tail.
        double variance = 0.0;
        if (model.gaussian_only()) {
            variance =
                la::detail::gauss_payoff_moments(payoff, model.sigma()).variance;
        } else {
            const auto& atom = model.atoms()->atoms.front();
            double p = std::exp(-atom.rate), cum = 0.0, m1 = 0.0, m2 = 0.0;
            for (std::size_t k = 0; 1.0 - cum >= 1e-18 ||
                                    static_cast<double>(k) <= atom.rate;
                 ++k) {
                const double fk = la::payoff_eval(
                    payoff, atom.x * (static_cast<double>(k) - atom.rate));
                m1 += p * fk;
                m2 += p * fk * fk;
                cum += p;
                p *= atom.rate / static_cast<double>(k + 1);
            }
            variance = std::max(0.0, m2 - m1 * m1);
        }
        double mass = c.tail_b;
        for (std::size_t n = 1; n <= c.n_cap(); ++n) mass += c.b(n);
        const double residual =
            std::abs(mass - variance) / std::max(variance, 1e-300);
        const std::string prefix = out_prefix.empty() ? "coeffs" : out_prefix;
        auto manifest = manifest_for("coeffs");
        manifest.inputs["payoff"] = la::payoff_to_json(payoff);
        manifest.inputs["nmax"] = nmax;
        json cj = la::chaos_to_json(c);
        cj["parseval_residual"] = residual;
        emit(prefix + ".json", cj, manifest);
        emit_text(prefix + ".csv", la::coeff_csv(c), manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- error-exact ----
    auto* cmd_exact =
        app.add_subcommand("error-exact", "closed-form error report on a net");
    NetArgs exact_net;
    std::string exact_process = "x";
    std::optional<double> exact_theta;
    exact_net.attach(cmd_exact);
    cmd_exact->add_option("--coeffs", coeffs_path, "coefficient JSON")
        ->required();
    cmd_exact->add_option("--process", exact_process, "x | s");
    add_common(cmd_exact);
    cmd_exact->callback([&]() {
        const la::ChaosSeq c = load_coeffs();
        const la::TimeNet net = exact_net.resolve();
        la::Process y;
        if (exact_process == "x") y = la::Process::X;
        else if (exact_process == "s") y = la::Process::S;
        else throw la::invalid_input("--process must be x or s");
        if (exact_net.file.empty()) exact_theta = exact_net.theta;
        const la::ErrorReport rep = la::make_error_report(c, net, exact_theta, y);
        json j;
        j["schema"] = 1;
        j["net"] = rep.net_points;
        j["a_x_opt"] = rep.a_x_opt;
        j["gap_bound"] = rep.gap_bound;
        if (rep.a_s_sim_bracket) {
            const auto& br = *rep.a_s_sim_bracket;
            j["a_s_sim_bracket"] = {{"low", br.low},
                                    {"high", br.high},
                                    {"v", br.v},
                                    {"constant", br.constant}};
        }
        if (rep.limit_constant_theta)
            j["limit_constant"] = *rep.limit_constant_theta;
        const std::string prefix =
            out_prefix.empty() ? "error_exact" : out_prefix;
        auto manifest = manifest_for("error-exact");
        manifest.inputs["process"] = exact_process;
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- error-mc ----
    auto* cmd_mc =
        app.add_subcommand("error-mc", "Monte Carlo error of the simple "
                                       "strategy, or a regression proxy");
    NetArgs mc_net;
    std::string mc_process = "x";
    std::size_t mc_paths = 10000;
    std::string mc_method = "simple";
    std::size_t mc_basis = 5;
    mc_net.attach(cmd_mc);
    cmd_mc->add_option("--coeffs", coeffs_path, "coefficient JSON")->required();
    cmd_mc->add_option("--process", mc_process, "x | s");
    cmd_mc->add_option("--paths", mc_paths, "Monte Carlo paths");
    cmd_mc->add_option("--method", mc_method, "simple | regression");
    cmd_mc->add_option("--basis", mc_basis, "regression basis size (1..5)");
    add_common(cmd_mc);
    cmd_mc->callback([&]() {
        const la::LevyModel model = load_model();
        const la::ChaosSeq c = load_coeffs();
        const la::TimeNet net = mc_net.resolve();
        la::Process y;
        if (mc_process == "x") y = la::Process::X;
        else if (mc_process == "s") y = la::Process::S;
        else throw la::invalid_input("--process must be x or s");
        json j;
        j["schema"] = 1;
        if (mc_method == "simple") {
            const la::SimErrorResult r =
                la::sim_error_mc(c, model, net, y, mc_paths, seed);
            j["value"] = r.est.value;
            j["std_error"] = r.est.std_error;
            j["used_exact_payoff"] = r.used_exact_payoff;
            j["chaos_tail"] = r.chaos_tail;
        } else if (mc_method == "regression") {
            const la::McEstimate r = la::opt_error_mc_regression(
                c, model, net, y, mc_paths, mc_basis, seed);
            j["value"] = r.value;
            j["std_error"] = r.std_error;
        } else {
            throw la::invalid_input("--method must be simple or regression");
        }
        j["paths"] = mc_paths;
        j["seed"] = seed;
        j["method"] = mc_method;
        const std::string prefix = out_prefix.empty() ? "error_mc" : out_prefix;
        auto manifest = manifest_for("error-mc");
        manifest.inputs["process"] = mc_process;
        manifest.inputs["paths"] = mc_paths;
        manifest.inputs["method"] = mc_method;
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- rate-sweep ----
    auto* cmd_rate =
        app.add_subcommand("rate-sweep", "error vs N on theta-nets");
    double rate_theta = 1.0;
    std::size_t rate_nmin = 4, rate_nmax = 1024;
    cmd_rate->add_option("--coeffs", coeffs_path, "coefficient JSON")
        ->required();
    cmd_rate->add_option("--theta", rate_theta, "net concentration parameter");
    cmd_rate->add_option("--n-min", rate_nmin, "smallest N (doubled up)");
    cmd_rate->add_option("--n-max", rate_nmax, "largest N");
    add_common(cmd_rate);
    cmd_rate->callback([&]() {
        const la::ChaosSeq c = load_coeffs();
        const la::RateTable table =
            la::rate_sweep(c, rate_theta, dyadic_sizes(rate_nmin, rate_nmax));
        const std::string prefix =
            out_prefix.empty() ? "rate_sweep" : out_prefix;
        auto manifest = manifest_for("rate-sweep");
        manifest.inputs["theta"] = rate_theta;
        manifest.inputs["n_min"] = rate_nmin;
        manifest.inputs["n_max"] = rate_nmax;
        emit_text(prefix + ".csv", la::rate_csv(table), manifest);
        json j;
        j["schema"] = 1;
        j["theta"] = rate_theta;
        j["slope"] = table.slope;
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- smoothness ----
    auto* cmd_smooth = app.add_subcommand(
        "smoothness", "fractional-smoothness verdicts and density bounds");
    double smooth_theta = 0.5;
    std::optional<double> smooth_eps;
    std::optional<double> smooth_psi_cap;
    std::size_t smooth_paths = 100000;
    cmd_smooth->add_option("--coeffs", coeffs_path, "coefficient JSON");
    cmd_smooth->add_option("--theta", smooth_theta, "smoothness parameter");
    cmd_smooth->add_option("--eps", smooth_eps,
                           "jump-size split for the density bounds");
    cmd_smooth->add_option("--psi-cap", smooth_psi_cap,
                           "linear small-ball cap c with psi(d) <= c d");
    cmd_smooth->add_option("--paths", smooth_paths,
                           "paths for the fitted small-ball cap");
    add_common(cmd_smooth);
    cmd_smooth->callback([&]() {
        json j;
        j["schema"] = 1;
        j["theta"] = smooth_theta;
        if (!coeffs_path.empty()) {
            const la::ChaosSeq c = load_coeffs();
            j["criteria"] = criteria_json(
                la::smoothness_criteria(c, smooth_theta));
            const la::WeightedSum ws = la::besov_weighted_sum(c, smooth_theta);
            j["weighted_series"] = verdict_json(ws.verdict, ws.block_exponent);
        }
        if (!model_path.empty() && smooth_eps) {
            const la::LevyModel model = load_model();
            const la::SmoothnessBounds sb = la::smoothness_bounds(
                model, *smooth_eps, smooth_psi_cap, smooth_paths, seed);
            json b;
            auto put = [&](const char* name, std::optional<double> v) {
                if (v) b[name] = *v;
                else b[name] = "inapplicable";
            };
            put("local_bound", sb.local_bound);
            put("total_mass_bound", sb.total_mass_bound);
            put("linear_psi_bound", sb.linear_psi_bound);
            put("three_halves_bound", sb.three_halves_bound);
            b["psi_cap"] = sb.psi_cap;
            b["psi_cap_fitted"] = sb.psi_cap_fitted;
            j["density_bounds"] = b;
        }
        if (!j.contains("criteria") && !j.contains("density_bounds"))
            throw la::invalid_input(
                "smoothness: need --coeffs and/or --model with --eps");
        const std::string prefix =
            out_prefix.empty() ? "smoothness" : out_prefix;
        auto manifest = manifest_for("smoothness");
        manifest.inputs["theta"] = smooth_theta;
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- psi ----
    auto* cmd_psi =
        app.add_subcommand("psi", "small-ball probability estimate");
    double psi_delta = 0.1;
    std::size_t psi_paths = 100000;
    double lam_min = -3.0, lam_max = 3.0;
    std::size_t lam_steps = 121;
    cmd_psi->add_option("--delta", psi_delta, "ball radius")->required();
    cmd_psi->add_option("--paths", psi_paths, "Monte Carlo paths");
    cmd_psi->add_option("--lambda-min", lam_min, "center grid start");
    cmd_psi->add_option("--lambda-max", lam_max, "center grid end");
    cmd_psi->add_option("--lambda-steps", lam_steps, "center grid size");
    add_common(cmd_psi);
    cmd_psi->callback([&]() {
        const la::LevyModel model = load_model();
        if (lam_steps < 2 || lam_max <= lam_min)
            throw la::invalid_input("psi: bad center grid");
        std::vector<double> grid(lam_steps);
        for (std::size_t i = 0; i < lam_steps; ++i)
            grid[i] = lam_min + (lam_max - lam_min) *
                                    static_cast<double>(i) /
                                    static_cast<double>(lam_steps - 1);
        const la::PsiEstimate est =
            la::psi_smallball(model, psi_delta, psi_paths, grid, seed);
        json j;
        j["schema"] = 1;
        j["delta"] = psi_delta;
        j["value"] = est.est.value;
        j["std_error"] = est.est.std_error;
        j["lambda_star"] = est.lambda_star;
        j["grid_too_coarse"] = est.grid_too_coarse;
        j["paths"] = psi_paths;
        j["seed"] = seed;
        const std::string prefix = out_prefix.empty() ? "psi" : out_prefix;
        auto manifest = manifest_for("psi");
        manifest.inputs["delta"] = psi_delta;
        manifest.inputs["paths"] = psi_paths;
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    // ---- report ----
    auto* cmd_report = app.add_subcommand(
        "report", "rate table, fitted slope, limit constant, verdicts");
    double rep_theta = 1.0;
    std::size_t rep_nmin = 4, rep_nmax = 1024;
    std::string rep_process = "x";
    cmd_report->add_option("--coeffs", coeffs_path, "coefficient JSON")
        ->required();
    cmd_report->add_option("--theta", rep_theta, "net concentration parameter");
    cmd_report->add_option("--n-min", rep_nmin, "smallest N (doubled up)");
    cmd_report->add_option("--n-max", rep_nmax, "largest N");
    cmd_report->add_option("--process", rep_process, "x | s");
    add_common(cmd_report);
    cmd_report->callback([&]() {
        const la::ChaosSeq c = load_coeffs();
        la::Process y;
        if (rep_process == "x") y = la::Process::X;
        else if (rep_process == "s") y = la::Process::S;
        else throw la::invalid_input("--process must be x or s");
        const auto Ns = dyadic_sizes(rep_nmin, rep_nmax);
        const la::RateTable table = la::rate_sweep(c, rep_theta, Ns);
        const la::LimitConstant lc = la::limit_constant(c, rep_theta, y);
        json j;
        j["schema"] = 1;
        j["theta"] = rep_theta;
        j["process"] = rep_process;
        j["slope"] = table.slope;
        j["limit_constant"] = {{"value", lc.value},
                               {"verdict", la::verdict_name(lc.verdict)},
                               {"block_exponent", lc.block_exponent}};
        j["criteria"] = criteria_json(la::smoothness_criteria(c, rep_theta));
        const la::WeightedSum ws = la::besov_weighted_sum(c, rep_theta);
        j["weighted_series"] = verdict_json(ws.verdict, ws.block_exponent);
        const std::string prefix = out_prefix.empty() ? "report" : out_prefix;
        auto manifest = manifest_for("report");
        manifest.inputs["theta"] = rep_theta;
        manifest.inputs["n_min"] = rep_nmin;
        manifest.inputs["n_max"] = rep_nmax;
        manifest.inputs["process"] = rep_process;
        emit_text(prefix + ".csv", la::rate_csv(table), manifest);
        emit(prefix + ".json", j, manifest);
        manifest.write(prefix + "_manifest.json");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const la::invalid_input& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const la::unsupported_model& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const la::numeric_failure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
