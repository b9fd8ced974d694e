#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "csos/app.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallel;
    bool deterministic = false;
    std::optional<int> N, L, r, m, site;
    std::optional<std::string> kappa, u, xi, s, s0, v, op, bra, ket;
    bool polynomial = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option("--seed", o.seed, "seed for \"random\" parameters");
    sub->add_option("--out", o.out, "report path (default: stdout)");
    sub->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--deterministic", o.deterministic, "sequential reductions on one thread");
    sub->add_option("--N", o.N, "number of sites");
    sub->add_option("--L", o.L, "period L of eta = r/L");
    sub->add_option("--r", o.r, "numerator r of eta = r/L");
    sub->add_option("--kappa", o.kappa, "twist, e.g. 0.3 or 0.3+0.1i");
    sub->add_option("--m", o.m, "number of sites in the generating function");
    sub->add_option("--xi", o.xi, "inhomogeneities, comma separated");
    sub->add_option("--s0", o.s0, "height offset");
    sub->add_option("--u", o.u, "spectral parameters (partition)");
    sub->add_option("--s", o.s, "dynamical parameter (partition)");
    sub->add_option("--v", o.v, "off-shell ket parameters (scalar-product)");
    sub->add_option("--site", o.site, "1-based site (form-factor)");
    sub->add_option("--operator", o.op, "E_mm, E_pp or sigma_z (form-factor)");
    sub->add_option("--bra", o.bra, "\"ground\" or census index");
    sub->add_option("--ket", o.ket, "\"ground\" or census index");
    sub->add_flag("--polynomial", o.polynomial, "also fit the kappa polynomial (two-point)");
}

csos::Json complex_json(const std::string& text, bool scalar) {
    const csos::CList zs = csos::parse_complex_list(text);
    if (scalar) {
        if (zs.size() != 1) csos::fail(csos::ErrorKind::ConfigError, "expected one complex number, got '" + text + "'");
        return csos::to_json(zs[0]);
    }
    return csos::to_json(zs);
}

csos::Json selector_json(const std::string& text) {
    if (text == "ground") return text;
    try {
        std::size_t pos = 0;
        const int i = std::stoi(text, &pos);
        if (pos == text.size()) return i;
    } catch (const std::logic_error&) {
    }
    csos::fail(csos::ErrorKind::ConfigError, "state selector must be \"ground\" or an index");
}

// Command-line values replace config-file keys before validation, so both paths share it.
csos::Json merged_config(const Overrides& o) {
    csos::Json j = csos::Json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) csos::fail(csos::ErrorKind::ConfigError, "cannot open config '" + o.config_path + "'");
        try {
            j = csos::Json::parse(in);
        } catch (const std::exception& e) {
            csos::fail(csos::ErrorKind::ConfigError, std::string("invalid JSON: ") + e.what());
        }
    }
    if (o.seed) j["seed"] = *o.seed;
    if (o.parallel) j["parallel"] = *o.parallel;
    if (o.deterministic) j["deterministic"] = true;
    if (!o.out.empty()) j["output"] = o.out;
    if (o.N) j["N"] = *o.N;
    if (o.L || o.r) {
        csos::Json eta = j.contains("eta") ? j["eta"] : csos::Json::object();
        if (o.L) eta["L"] = *o.L;
        if (o.r) eta["r"] = *o.r;
        j["eta"] = eta;
    }
    if (o.m) j["m"] = *o.m;
    if (o.site) j["site"] = *o.site;
    if (o.kappa) j["kappa"] = complex_json(*o.kappa, true);
    if (o.xi) j["xi"] = *o.xi == "random" ? csos::Json("random") : complex_json(*o.xi, false);
    if (o.u) j["u"] = *o.u == "random" ? csos::Json("random") : complex_json(*o.u, false);
    if (o.v) j["v"] = *o.v == "random" ? csos::Json("random") : complex_json(*o.v, false);
    if (o.s0) j["s0"] = *o.s0 == "random" ? csos::Json("random") : complex_json(*o.s0, true);
    if (o.s) j["s"] = *o.s == "random" ? csos::Json("random") : complex_json(*o.s, true);
    if (o.op) j["operator"] = *o.op;
    if (o.bra) j["bra"] = selector_json(*o.bra);
    if (o.ket) j["ket"] = selector_json(*o.ket);
    if (o.polynomial) j["polynomial"] = true;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the cyclic SOS model"};
    app.require_subcommand(1);
    std::map<std::string, Overrides> overrides;
    std::map<std::string, CLI::App*> subs;
    const std::map<std::string, std::string> help = {
        {"verify", "run the property suite"},
        {"partition", "domain-wall partition function"},
        {"scalar-product", "scalar product with a kappa=1 eigenstate"},
        {"norm", "norm of a kappa=1 eigenstate"},
        {"form-factor", "local form factor between eigenstates"},
        {"census", "all twisted Bethe solutions at kappa"},
        {"two-point", "two-point generating function"}};
    for (const auto& name : csos::kSubcommands) {
        subs[name] = app.add_subcommand(name, help.at(name));
        add_common(subs[name], overrides[name]);
    }
    CLI11_PARSE(app, argc, argv);

    std::string name;
    for (const auto& [k, s] : subs)
        if (s->parsed()) name = k;
    const Overrides& o = overrides[name];

    csos::Report rep;
    try {
        rep = csos::run(name, csos::parse_config(merged_config(o)));
    } catch (const csos::Error& e) {
        rep.exit_code = 2;
        rep.body = csos::Json{{"schema", csos::kReportSchema},
                              {"subcommand", name},
                              {"config", nullptr},
                              {"status", "error"},
                              {"error", {{"kind", csos::error_name(e.kind())}, {"message", e.what()}}}};
    }

    const std::string text = csos::render(rep.body);
    std::string path = o.out;
    if (path.empty() && rep.body.contains("config") && rep.body["config"].is_object())
        path = rep.body["config"].value("output", "");
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write report to " << path << "\n";
            return 2;
        }
        out << text;
        std::cerr << name << ": " << rep.body.value("status", "") << " (exit " << rep.exit_code << "), report in "
                  << path << "\n";
    }
    return rep.exit_code;
}
