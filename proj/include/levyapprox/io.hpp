#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "levyapprox/chaos.hpp"
#include "levyapprox/error_functionals.hpp"
#include "levyapprox/levy_model.hpp"
#include "levyapprox/time_net.hpp"

namespace levyapprox {

using json = nlohmann::json;

// ---- model JSON: {"sigma": s, "jumps": {"type": ..., ...}} ----

inline json model_to_json(const LevyModel& m) {
    json j;
    j["sigma"] = m.sigma();
    if (m.gaussian_only()) {
        j["jumps"] = {{"type", "none"}};
    } else if (const auto* a = m.atoms()) {
        json atoms = json::array();
        for (const auto& atom : a->atoms)
            atoms.push_back({{"x", atom.x}, {"rate", atom.rate}});
        j["jumps"] = {{"type", "atoms"}, {"atoms", atoms}};
    } else {
        const auto& ts = *m.tempered_stable();
        j["jumps"] = {{"type", "tempered_stable"}, {"d", ts.d},
                      {"alpha", ts.alpha},         {"m", ts.m},
                      {"eps_trunc", ts.eps_trunc}};
    }
    return j;
}

inline LevyModel model_from_json(const json& j) {
    try {
        const double sigma = j.at("sigma").get<double>();
        const json& jj = j.at("jumps");
        const std::string type = jj.at("type").get<std::string>();
        if (type == "none") return LevyModel(sigma, NoJumps{});
        if (type == "atoms") {
            Atoms a;
            for (const auto& e : jj.at("atoms"))
                a.atoms.push_back(
                    {e.at("x").get<double>(), e.at("rate").get<double>()});
            return LevyModel(sigma, std::move(a));
        }
        if (type == "tempered_stable") {
            TemperedStable ts;
            ts.d = jj.at("d").get<double>();
            ts.alpha = jj.at("alpha").get<double>();
            ts.m = jj.at("m").get<double>();
            ts.eps_trunc = jj.value("eps_trunc", 0.1);
            return LevyModel(sigma, ts);
        }
        throw invalid_input("model JSON: unknown jumps.type '" + type + "'");
    } catch (const json::exception& e) {
        throw invalid_input(std::string("model JSON: ") + e.what());
    }
}

inline LevyModel model_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw invalid_input(std::string("model JSON parse: ") + e.what());
    }
    return model_from_json(j);
}

// ---- payoff JSON ----

inline json payoff_to_json(const PayoffSpec& p) {
    json j;
    if (const auto* d = std::get_if<Digital>(&p)) {
        j = {{"type", "digital"}, {"K", d->K}};
    } else if (const auto* md = std::get_if<MollifiedDigital>(&p)) {
        j = {{"type", "mollified"}, {"K", md->K}, {"eps", md->eps}};
    } else if (const auto* pol = std::get_if<Polynomial>(&p)) {
        j = {{"type", "poly"}, {"coeffs", pol->coeffs}};
    } else {
        const auto& tab = std::get<Tabulated>(p);
        j = {{"type", "tabulated"}, {"grid", tab.grid}, {"values", tab.values}};
    }
    return j;
}

inline PayoffSpec payoff_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "digital") return Digital{j.at("K").get<double>()};
        if (type == "mollified")
            return MollifiedDigital{j.at("K").get<double>(),
                                    j.at("eps").get<double>()};
        if (type == "poly")
            return Polynomial{j.at("coeffs").get<std::vector<double>>()};
        if (type == "tabulated")
            return Tabulated{j.at("grid").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>()};
        throw invalid_input("payoff JSON: unknown type '" + type + "'");
    } catch (const json::exception& e) {
        throw invalid_input(std::string("payoff JSON: ") + e.what());
    }
}

// ---- coefficient JSON: {"mode","mu_total","n_max","h":[...],...} ----
// "h" carries the raw kernel values (0 where they underflow); "coeff"
// carries the orthonormal values c_n and is authoritative on reload.

inline json chaos_to_json(const ChaosSeq& c) {
    json j;
    j["schema"] = 1;
    j["mu_total"] = c.mu;
    j["tail"] = c.tail_b;
    j["mean"] = c.mean;
    if (c.payoff) j["payoff"] = payoff_to_json(*c.payoff);
    if (c.mode == ChaosMode::Scalar) {
        j["mode"] = "scalar";
        j["n_max"] = c.n_cap() > 0 ? c.n_cap() - 1 : 0;
        std::vector<double> h(c.n_cap());
        for (std::size_t n = 1; n <= c.n_cap(); ++n) h[n - 1] = c.h_raw(n);
        j["h"] = h;
        j["coeff"] = c.coeff;
    } else {
        j["mode"] = "atomic_tensor";
        j["n_max"] = c.tensors.empty() ? 0 : c.tensors.size() - 1;
        j["atom_masses"] = c.atom_masses;
        j["tensors"] = c.tensors;
    }
    return j;
}

inline ChaosSeq chaos_from_json(const json& j) {
    try {
        const double mu = j.at("mu_total").get<double>();
        const std::string mode = j.at("mode").get<std::string>();
        ChaosSeq out;
        if (mode == "scalar") {
            if (j.contains("coeff")) {
                out = ChaosSeq::scalar(j.at("coeff").get<std::vector<double>>(),
                                       mu);
            } else {
                out = ChaosSeq::scalar_from_h(
                    j.at("h").get<std::vector<double>>(), mu);
            }
        } else if (mode == "atomic_tensor") {
            out = ChaosSeq::atomic(
                j.at("tensors").get<std::vector<std::vector<double>>>(),
                j.at("atom_masses").get<std::vector<double>>());
        } else {
            throw invalid_input("chaos JSON: unknown mode '" + mode + "'");
        }
        out.tail_b = j.value("tail", 0.0);
        out.mean = j.value("mean", 0.0);
        if (j.contains("payoff")) out.payoff = payoff_from_json(j.at("payoff"));
        return out;
    } catch (const json::exception& e) {
        throw invalid_input(std::string("chaos JSON: ") + e.what());
    }
}

inline ChaosSeq chaos_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open coefficient file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw invalid_input(std::string("chaos JSON parse: ") + e.what());
    }
    return chaos_from_json(j);
}

// ---- CSV ----

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write file: " + path);
    out << body;
}

inline std::string net_csv(const TimeNet& net) {
    std::string s = "k,t\n";
    for (std::size_t k = 0; k < net.points().size(); ++k)
        s += std::to_string(k) + "," + fmt(net[k]) + "\n";
    return s;
}

inline std::string coeff_csv(const ChaosSeq& c) {
    require(c.mode == ChaosMode::Scalar, "coeff_csv: scalar mode only");
    std::string s = "n,h,b_n\n";
    for (std::size_t n = 1; n <= c.n_cap(); ++n)
        s += std::to_string(n) + "," + fmt(c.h_raw(n)) + "," + fmt(c.b(n)) + "\n";
    return s;
}

inline std::string rate_csv(const RateTable& t) {
    std::string s = "N,a_x_opt\n";
    for (const auto& row : t.rows)
        s += std::to_string(row.N) + "," + fmt(row.a) + "\n";
    return s;
}

// ---- run manifest ----

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot read back output file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(os.str());
    return hex.str();
}

struct RunManifest {
    std::string command;
    json inputs = json::object();
    std::uint64_t seed = 0;
    std::string tool_version = "1.0.0";
    std::vector<std::string> outputs;

    void write(const std::string& path) const {
        json j;
        j["command"] = command;
        j["inputs"] = inputs;
        j["seed"] = seed;
        j["tool_version"] = tool_version;
        j["outputs"] = json::array();
        for (const auto& f : outputs)
            j["outputs"].push_back({{"path", f}, {"digest", file_digest(f)}});
        write_text_file(path, j.dump(2) + "\n");
    }
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Convergent: return "convergent";
        case Verdict::Divergent: return "divergent";
        default: return "inconclusive";
    }
}

}  // namespace levyapprox
