#include "csos/app.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "csos/oracle.hpp"

namespace csos {

namespace {

// Oracle comparisons build 2^N-dimensional operators; beyond this they are skipped.
constexpr int kOracleMaxN = 8;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::ConfigError, what); }

cplx parse_complex(const Json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    config_error("'" + key + "' must be a number or [re, im]");
}

ComplexParam parse_param(const Json& j, const std::string& key, bool scalar) {
    ComplexParam p;
    if (j.is_string()) {
        if (j.get<std::string>() != "random") config_error("'" + key + "' accepts only the string \"random\"");
        return p;
    }
    p.random = false;
    if (scalar) {
        p.values = {parse_complex(j, key)};
        return p;
    }
    if (!j.is_array()) config_error("'" + key + "' must be \"random\" or a list of [re, im]");
    for (const auto& e : j) p.values.push_back(parse_complex(e, key));
    return p;
}

int parse_int(const Json& j, const std::string& key) {
    if (!j.is_number_integer()) config_error("'" + key + "' must be an integer");
    return j.get<int>();
}

double parse_double(const Json& j, const std::string& key) {
    if (!j.is_number()) config_error("'" + key + "' must be a number");
    return j.get<double>();
}

StateSelector parse_selector(const Json& j, const std::string& key) {
    StateSelector s;
    if (j.is_string()) {
        if (j.get<std::string>() != "ground") config_error("'" + key + "' accepts only the string \"ground\"");
        return s;
    }
    if (j.is_number_integer()) {
        s.kind = StateSelector::Kind::index;
        s.index = j.get<int>();
        if (s.index < 0) config_error("'" + key + "' index must be non-negative");
        return s;
    }
    if (j.is_object()) {
        s.kind = StateSelector::Kind::label;
        for (const auto& [k, v] : j.items()) {
            if (k == "subset") {
                if (!v.is_array()) config_error("'" + key + ".subset' must be a list of sites");
                for (const auto& e : v) s.label.subset.push_back(parse_int(e, key + ".subset"));
            } else if (k == "branch") {
                s.label.branch = parse_int(v, key + ".branch");
            } else {
                config_error("unknown key '" + key + "." + k + "'");
            }
        }
        return s;
    }
    config_error("'" + key + "' must be \"ground\", an index or {subset, branch}");
}

Json selector_json(const StateSelector& s) {
    switch (s.kind) {
        case StateSelector::Kind::ground: return "ground";
        case StateSelector::Kind::index: return s.index;
        case StateSelector::Kind::label: return Json{{"subset", s.label.subset}, {"branch", s.label.branch}};
    }
    return nullptr;
}

const char* op_name(FormFactorOp op) {
    switch (op) {
        case FormFactorOp::E_mm: return "E_mm";
        case FormFactorOp::E_pp: return "E_pp";
        case FormFactorOp::sigma_z: return "sigma_z";
    }
    return "";
}

FormFactorOp parse_op(const std::string& name) {
    if (name == "E_mm") return FormFactorOp::E_mm;
    if (name == "E_pp") return FormFactorOp::E_pp;
    if (name == "sigma_z") return FormFactorOp::sigma_z;
    config_error("operator must be E_mm, E_pp or sigma_z");
}

Json param_json(const ComplexParam& p, bool scalar) {
    if (p.random) return "random";
    if (p.values.empty()) return nullptr;
    return scalar ? to_json(p.values.at(0)) : to_json(p.values);
}

void parse_tolerances(const Json& j, RunConfig& c) {
    if (!j.is_object()) config_error("'tolerances' must be an object");
    SolverOptions& o = c.solver;
    for (const auto& [k, v] : j.items()) {
        if (k == "kappa_start") o.kappa_start = parse_double(v, k);
        else if (k == "initial_step") o.initial_step = parse_double(v, k);
        else if (k == "max_step") o.max_step = parse_double(v, k);
        else if (k == "min_step") o.min_step = parse_double(v, k);
        else if (k == "step_budget") o.step_budget = parse_int(v, k);
        else if (k == "newton_iterations") o.newton_iterations = parse_int(v, k);
        else if (k == "max_newton_step") o.max_newton_step = parse_double(v, k);
        else if (k == "max_displacement") o.max_displacement = parse_double(v, k);
        else if (k == "collision_threshold") o.collision_threshold = parse_double(v, k);
        else if (k == "admissibility_threshold") o.admissibility_threshold = parse_double(v, k);
        else if (k == "accept_residual") o.accept_residual = parse_double(v, k);
        else if (k == "theta_series_tolerance") c.theta_tolerance = parse_double(v, k);
        else if (k == "theta_max_terms") c.theta_max_terms = parse_int(v, k);
        else config_error("unknown tolerance '" + k + "'");
    }
    const double positives[] = {o.kappa_start, o.initial_step, o.max_step, o.min_step, o.max_newton_step,
                                o.max_displacement, o.collision_threshold, o.admissibility_threshold,
                                o.accept_residual, c.theta_tolerance};
    for (const double x : positives)
        if (!(x > 0.0) || !std::isfinite(x)) config_error("tolerances must be positive and finite");
    if (o.step_budget < 1 || o.newton_iterations < 1 || c.theta_max_terms < 4)
        config_error("iteration limits are too small");
    if (o.min_step > o.max_step) config_error("min_step exceeds max_step");
}

Json tolerances_json(const RunConfig& c) {
    const SolverOptions& o = c.solver;
    return Json{{"kappa_start", o.kappa_start},
                {"initial_step", o.initial_step},
                {"max_step", o.max_step},
                {"min_step", o.min_step},
                {"step_budget", o.step_budget},
                {"newton_iterations", o.newton_iterations},
                {"max_newton_step", o.max_newton_step},
                {"max_displacement", o.max_displacement},
                {"collision_threshold", o.collision_threshold},
                {"admissibility_threshold", o.admissibility_threshold},
                {"accept_residual", o.accept_residual},
                {"theta_series_tolerance", c.theta_tolerance},
                {"theta_max_terms", c.theta_max_terms}};
}

Json config_json(const RunConfig& c) {
    return Json{{"eta", {{"r", c.r}, {"L", c.L}}},
                {"tau", to_json(c.tau)},
                {"N", c.N},
                {"xi", param_json(c.xi, false)},
                {"s0", param_json(c.s0, true)},
                {"seed", c.seed},
                {"kappa", to_json(c.kappa)},
                {"m", c.m},
                {"u", param_json(c.u, false)},
                {"s", param_json(c.s, true)},
                {"v", param_json(c.v, false)},
                {"omega_branch", c.omega_branch},
                {"bra", selector_json(c.bra)},
                {"ket", selector_json(c.ket)},
                {"site", c.site},
                {"operator", op_name(c.op)},
                {"polynomial", c.polynomial},
                {"tolerances", tolerances_json(c)},
                {"parallel", c.deterministic ? 1 : c.threads},
                {"deterministic", c.deterministic},
                {"output", c.output}};
}

Json check_json(const CheckResult& c) {
    return Json{{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass},
                {"detail", c.detail}};
}

Json solution_json(const BetheSolution& s) {
    return Json{{"roots", to_json(s.roots)},
                {"omega", to_json(s.omega)},
                {"kappa", to_json(s.kappa)},
                {"residual", s.residual_norm},
                {"admissible", s.admissible},
                {"off_diagonal", s.off_diagonal},
                {"seed", {{"subset", s.seed.subset}, {"branch", s.seed.branch}}},
                {"steps", s.steps}};
}

Json census_json(const Census& c) {
    Json sols = Json::array();
    for (const auto& s : c.solutions) sols.push_back(solution_json(s));
    Json fails = Json::array();
    for (const auto& f : c.failures)
        fails.push_back({{"seed", {{"subset", f.seed.subset}, {"branch", f.seed.branch}}}, {"error", f.error}});
    return Json{{"kappa", to_json(c.kappa)},  {"expected", c.expected},         {"found", c.solutions.size()},
                {"complete", c.complete()},   {"duplicates", c.duplicates},     {"inadmissible", c.inadmissible},
                {"failures", std::move(fails)}, {"solutions", std::move(sols)}};
}

Json comparison(cplx value, std::optional<cplx> oracle, double floor, const std::string& scale_note) {
    Json j{{"value", to_json(value)}};
    if (oracle) {
        j["oracle"] = to_json(*oracle);
        j["relative_error"] = rel_err(value, *oracle, floor);
        j["error_scale"] = scale_note;
    } else {
        j["oracle"] = nullptr;
    }
    return j;
}

// Everything a run needs after the random draws.
struct Resolved {
    RunConfig cfg;
    EllipticContext ctx;
    std::optional<LatticeConfig> lat;
    int threads = 1;
};

bool census_subcommand(const std::string& sub) { return sub != "partition"; }

Resolved resolve(const std::string& sub, const RunConfig& in) {
    RunConfig c = in;
    const EllipticContext ctx(c.r, c.L, c.tau, c.theta_tolerance, c.theta_max_terms);
    SafeBox box(ctx, c.seed);
    const int n = c.N / 2;
    Resolved out{c, ctx, std::nullopt, c.deterministic ? 1 : std::max(1, c.threads)};

    if (census_subcommand(sub)) {
        if (c.N % 2 != 0) config_error("census-based subcommands need even N");
        if (c.L % 2 == 0) config_error("census-based subcommands need odd L");
        if (c.L <= n) config_error("census-based subcommands need L > N/2");
        if (!c.xi.random && static_cast<int>(c.xi.values.size()) != c.N) config_error("xi must have N entries");
        // Resample random parts until the lattice validates; explicit values are rejected, not repaired.
        for (int attempt = 0;; ++attempt) {
            CList xi = c.xi.random ? box.draw(c.N) : c.xi.values;
            const cplx s0 = c.s0.random ? box.draw() : c.s0.values.at(0);
            try {
                LatticeConfig lat(ctx, xi, s0);
                lat.validate();
                out.lat = lat;
                out.cfg.xi = {false, xi};
                out.cfg.s0 = {false, {s0}};
                break;
            } catch (const Error&) {
                if ((!c.xi.random && !c.s0.random) || attempt > 100) throw;
            }
        }
        if (sub == "scalar-product" && !c.v.random && !c.v.values.empty() && static_cast<int>(c.v.values.size()) != n)
            config_error("v must have N/2 entries");
        if (sub == "scalar-product" && c.v.random) out.cfg.v = {false, box.draw(n)};
        if (c.omega_branch < 0 || c.omega_branch >= c.L) config_error("omega_branch must lie in 0..L-1");
    } else {
        if (!c.u.random && static_cast<int>(c.u.values.size()) != c.N) config_error("u must have N entries");
        if (!c.xi.random && static_cast<int>(c.xi.values.size()) != c.N) config_error("xi must have N entries");
        out.cfg.u = {false, c.u.random ? box.draw(c.N) : c.u.values};
        out.cfg.xi = {false, c.xi.random ? box.draw(c.N) : c.xi.values};
        out.cfg.s = {false, {c.s.random ? box.draw() : c.s.values.at(0)}};
    }
    return out;
}

const BetheSolution& select_state(const StateSelector& sel, const Census& c1, const LatticeConfig& lat,
                                  std::optional<BetheSolution>& ground_cache) {
    switch (sel.kind) {
        case StateSelector::Kind::ground:
            if (!ground_cache) ground_cache = select_ground(c1, lat);
            return *ground_cache;
        case StateSelector::Kind::index:
            if (sel.index >= static_cast<int>(c1.solutions.size()))
                config_error("state index exceeds the census size");
            return c1.solutions[sel.index];
        case StateSelector::Kind::label:
            for (const auto& s : c1.solutions)
                if (s.seed.subset == sel.label.subset && s.seed.branch == sel.label.branch) return s;
            config_error("no census solution carries the requested seed label");
    }
    config_error("bad state selector");
}

// CensusIncomplete that carries what was found, for the partial report.
struct PartialCensus : Error {
    PartialCensus(const std::string& what, Json c) : Error(ErrorKind::CensusIncomplete, what), census(std::move(c)) {}
    Json census;
};

Census census_at_one(const Resolved& r) {
    Census c = enumerate_solutions(1.0, *r.lat, r.cfg.solver, r.threads);
    if (!c.complete()) {
        std::ostringstream os;
        os << "kappa=1 census has " << c.solutions.size() << " of " << c.expected << " solutions";
        throw PartialCensus(os.str(), census_json(c));
    }
    return c;
}

Json run_verify(const Resolved& r, int& exit_code) {
    const LatticeConfig& lat = *r.lat;
    const std::uint64_t seed = r.cfg.seed;
    std::vector<CheckResult> all;
    auto add = [&](std::vector<CheckResult> v) { all.insert(all.end(), v.begin(), v.end()); };
    add(check_elliptic(r.ctx, 100, seed));
    add(check_r_matrix(r.ctx, 50, seed + 1));
    all.push_back(check_rtt(lat, 10, seed + 2));
    for (int N = 1; N <= 3; ++N) add(check_partition(r.ctx, N, 10, seed + 3 + N));
    for (int N = 2; N <= 3; ++N) add(check_partition_recursion(r.ctx, N, seed + 7 + N));
    add(check_partial_sp(lat, 5, seed + 11));
    const Census c1 = census_at_one(r);
    add(check_scalar_products(lat, c1, 10, seed + 12));
    if (lat.N <= 4) add(check_inverse_problem(lat));
    add(check_form_factors(lat, c1, lat.N == 2 ? -1 : 10, seed + 13));
    add(check_recursion(lat, c1, seed + 14));
    add(check_witness(lat, c1, 10, seed + 15));
    add(check_census(lat, r.cfg.kappa, r.threads));
    all.push_back(check_seed_asymptotics(lat));

    Json checks = Json::array();
    int failed = 0;
    for (const auto& c : all) {
        checks.push_back(check_json(c));
        failed += !c.pass;
    }
    exit_code = failed == 0 ? 0 : 1;
    return Json{{"passed", all.size() - failed}, {"failed", failed}, {"checks", std::move(checks)}};
}

Json run_partition(const Resolved& r) {
    const CList& u = r.cfg.u.values;
    const CList& xi = r.cfg.xi.values;
    const cplx s = r.cfg.s.values.at(0);
    const cplx z1 = partition_det(u, xi, s, {}, PartitionVariant::Z1, r.ctx);
    const cplx z2 = partition_det(u, xi, s, {}, PartitionVariant::Z2, r.ctx);
    std::optional<cplx> bf;
    if (r.cfg.N <= kOracleMaxN) bf = partition_function_bf(u, xi, s, r.ctx);
    Json j{{"Z1", comparison(z1, bf, 1e-300, "max(|value|, |oracle|)")},
           {"Z2", comparison(z2, bf, 1e-300, "max(|value|, |oracle|)")},
           {"Z1_vs_Z2", rel_err(z1, z2)}};
    return j;
}

Json run_scalar_product(const Resolved& r) {
    const LatticeConfig& lat = *r.lat;
    const Census c1 = census_at_one(r);
    std::optional<BetheSolution> ground;
    const BetheSolution& bra = select_state(r.cfg.bra, c1, lat, ground);
    CList v;
    cplx wv;
    Json ket_desc;
    if (!r.cfg.v.values.empty()) {
        v = r.cfg.v.values;
        wv = omega_values(lat.n, lat.ctx).at(r.cfg.omega_branch);
        ket_desc = Json{{"roots", to_json(v)}, {"omega", to_json(wv)}};
    } else {
        const BetheSolution& k = select_state(r.cfg.ket, c1, lat, ground);
        v = k.roots;
        wv = k.omega;
        ket_desc = solution_json(k);
    }
    const DetValue d = scalar_product_det(bra, v, wv, lat);
    std::optional<cplx> o;
    if (lat.N <= kOracleMaxN)
        o = pairing(bethe_state(Direction::bra, bra.roots, bra.omega, lat), bethe_state(Direction::ket, v, wv, lat));
    // Normalize by the bra norm so overlaps that vanish by orthogonality are judged on their own scale.
    const double floor = std::abs(norm_det(bra, lat));
    Json j = comparison(d.value, o, floor, "max(|value|, |oracle|, |<u|u>|)");
    j["route"] = route_name(d.route);
    j["rcond"] = d.rcond;
    j["bra"] = solution_json(bra);
    j["ket"] = ket_desc;
    return j;
}

Json run_norm(const Resolved& r) {
    const LatticeConfig& lat = *r.lat;
    const Census c1 = census_at_one(r);
    std::optional<BetheSolution> ground;
    const BetheSolution& s = select_state(r.cfg.bra, c1, lat, ground);
    const cplx g = gaudin_norm(s, lat);
    const cplx y = norm_det(s, lat);
    std::optional<cplx> o;
    if (lat.N <= kOracleMaxN)
        o = pairing(bethe_state(Direction::bra, s.roots, s.omega, lat), bethe_state(Direction::ket, s.roots, s.omega, lat));
    Json j = comparison(g, o, 1e-300, "max(|value|, |oracle|)");
    j["gradient_form"] = to_json(y);
    j["gaudin_vs_gradient_form"] = rel_err(g, y);
    j["state"] = solution_json(s);
    return j;
}

Json run_form_factor(const Resolved& r) {
    const LatticeConfig& lat = *r.lat;
    if (r.cfg.site < 1 || r.cfg.site > lat.N) config_error("site must lie in 1..N");
    const Census c1 = census_at_one(r);
    std::optional<BetheSolution> ground;
    const BetheSolution& bra = select_state(r.cfg.bra, c1, lat, ground);
    const BetheSolution& ket = select_state(r.cfg.ket, c1, lat, ground);
    const DetValue d = form_factor_det(r.cfg.op, r.cfg.site, bra, ket, lat);
    std::optional<cplx> o;
    double floor = 1e-300;
    if (lat.N <= kOracleMaxN) {
        const auto bb = bethe_state(Direction::bra, bra.roots, bra.omega, lat);
        const auto bk = bethe_state(Direction::ket, bra.roots, bra.omega, lat);
        const auto kb = bethe_state(Direction::bra, ket.roots, ket.omega, lat);
        const auto kk = bethe_state(Direction::ket, ket.roots, ket.omega, lat);
        o = local_matrix_element_bf(static_cast<LocalOp>(r.cfg.op), r.cfg.site, bb, kk, lat);
        floor = std::sqrt(std::abs(pairing(bb, bk) * pairing(kb, kk)));
    }
    Json j = comparison(d.value, o, floor, "max(|value|, |oracle|, sqrt|<u|u><v|v>|)");
    j["route"] = route_name(d.route);
    j["rcond"] = d.rcond;
    j["operator"] = op_name(r.cfg.op);
    j["site"] = r.cfg.site;
    j["bra"] = solution_json(bra);
    j["ket"] = solution_json(ket);
    return j;
}

Json run_census(const Resolved& r, int& exit_code) {
    const Census c = enumerate_solutions(r.cfg.kappa, *r.lat, r.cfg.solver, r.threads);
    Json j = census_json(c);
    std::ostringstream summary;
    summary << c.solutions.size() << " solutions, " << (c.expected - static_cast<int>(c.solutions.size()))
            << " defects";
    j["summary"] = summary.str();
    if (!c.complete()) exit_code = 4;
    return j;
}

Json run_two_point(const Resolved& r, int& exit_code) {
    const LatticeConfig& lat = *r.lat;
    if (r.cfg.m < 1 || r.cfg.m > lat.N) config_error("m must lie in 1..N");
    const Census c1 = census_at_one(r);
    std::optional<BetheSolution> ground_cache;
    const BetheSolution ground = select_state(r.cfg.bra, c1, lat, ground_cache);
    const Census ck = enumerate_solutions(r.cfg.kappa, lat, r.cfg.solver, r.threads);
    Json j{{"ground", solution_json(ground)}, {"m", r.cfg.m}};
    if (!ck.complete()) {
        j["census"] = census_json(ck);
        exit_code = 4;
        j["error"] = {{"kind", "CensusIncomplete"}, {"message", "census at kappa is incomplete"}};
        return j;
    }
    const cplx val = two_point_generating(ground, r.cfg.m, ck, lat, r.threads);
    std::optional<cplx> o;
    if (lat.N <= kOracleMaxN)
        o = generating_function_bf(r.cfg.kappa, r.cfg.m,
                                   bethe_state(Direction::bra, ground.roots, ground.omega, lat),
                                   bethe_state(Direction::ket, ground.roots, ground.omega, lat), lat);
    j["generating_function"] = comparison(val, o, 1e-300, "max(|value|, |oracle|)");
    j["kappa"] = to_json(r.cfg.kappa);
    j["census_size"] = ck.solutions.size();
    j["completeness_defect"] = completeness_defect(ground, ck, lat, r.threads);
    if (r.cfg.polynomial) {
        const GeneratingFunctionResult fit = generating_polynomial(ground, r.cfg.m, lat, -1, r.cfg.solver, r.threads);
        Json samples = Json::array();
        for (const auto& [k, v] : fit.kappa_samples) samples.push_back({{"kappa", k}, {"value", to_json(v)}});
        Json probs = Json::array();
        for (int i = 0; i <= r.cfg.m; ++i) {
            const int ell = r.cfg.m - 2 * i;
            probs.push_back({{"ell", ell}, {"probability", to_json(fit.polynomial_coeffs[i])}});
        }
        j["polynomial"] = {{"coefficients", to_json(fit.polynomial_coeffs)},
                           {"samples", std::move(samples)},
                           {"vandermonde_condition", fit.vandermonde_condition},
                           {"census_sizes", fit.census_sizes},
                           {"completeness_defect", fit.completeness_defect},
                           {"height_probabilities", std::move(probs)}};
    }
    return j;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::ConfigError: return 2;
        case ErrorKind::CensusIncomplete: return 4;
        default: return 3;
    }
}

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CList& zs) {
    Json j = Json::array();
    for (const cplx z : zs) j.push_back(to_json(z));
    return j;
}

CList parse_complex_list(const std::string& text) {
    CList out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char ch) { return std::isspace(ch); }), tok.end());
        if (tok.empty()) config_error("empty entry in complex list '" + text + "'");
        try {
            if (tok.back() != 'i') {
                std::size_t pos = 0;
                const double re = std::stod(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                out.emplace_back(re, 0.0);
                continue;
            }
            const std::string body = tok.substr(0, tok.size() - 1);
            // Split at the last sign that is not an exponent sign.
            std::size_t split = std::string::npos;
            for (std::size_t i = body.size(); i-- > 1;)
                if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
                    split = i;
                    break;
                }
            double re = 0.0, im = 0.0;
            std::size_t pos = 0;
            const std::string re_s = split == std::string::npos ? "" : body.substr(0, split);
            std::string im_s = split == std::string::npos ? body : body.substr(split);
            if (im_s.empty() || im_s == "+" || im_s == "-") im_s += "1";
            if (!re_s.empty()) {
                re = std::stod(re_s, &pos);
                if (pos != re_s.size()) throw std::invalid_argument(tok);
            }
            im = std::stod(im_s, &pos);
            if (pos != im_s.size()) throw std::invalid_argument(tok);
            out.emplace_back(re, im);
        } catch (const std::logic_error&) {
            config_error("cannot parse complex number '" + tok + "'");
        }
    }
    if (out.empty()) config_error("empty complex list");
    return out;
}

RunConfig parse_config(const Json& j) {
    if (!j.is_object()) config_error("config must be a JSON object");
    RunConfig c;
    for (const auto& [k, v] : j.items()) {
        if (k == "schema") continue;
        // The resolved config writes unset optional parameters as null; null keeps the default.
        if (v.is_null() && (k == "xi" || k == "s0" || k == "u" || k == "s" || k == "v")) continue;
        if (k == "eta") {
            if (!v.is_object()) config_error("'eta' must be {r, L}");
            for (const auto& [ek, ev] : v.items()) {
                if (ek == "r") c.r = parse_int(ev, "eta.r");
                else if (ek == "L") c.L = parse_int(ev, "eta.L");
                else config_error("unknown key 'eta." + ek + "'");
            }
        } else if (k == "tau") c.tau = parse_complex(v, k);
        else if (k == "N") c.N = parse_int(v, k);
        else if (k == "xi") c.xi = parse_param(v, k, false);
        else if (k == "s0") c.s0 = parse_param(v, k, true);
        else if (k == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) config_error("'seed' must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (k == "kappa") c.kappa = parse_complex(v, k);
        else if (k == "m") c.m = parse_int(v, k);
        else if (k == "output") {
            if (!v.is_string()) config_error("'output' must be a path string");
            c.output = v.get<std::string>();
        } else if (k == "tolerances") parse_tolerances(v, c);
        else if (k == "u") c.u = parse_param(v, k, false);
        else if (k == "s") c.s = parse_param(v, k, true);
        else if (k == "v") c.v = parse_param(v, k, false);
        else if (k == "omega_branch") c.omega_branch = parse_int(v, k);
        else if (k == "bra") c.bra = parse_selector(v, k);
        else if (k == "ket") c.ket = parse_selector(v, k);
        else if (k == "site") c.site = parse_int(v, k);
        else if (k == "operator") {
            if (!v.is_string()) config_error("'operator' must be a string");
            c.op = parse_op(v.get<std::string>());
        } else if (k == "polynomial") {
            if (!v.is_boolean()) config_error("'polynomial' must be a boolean");
            c.polynomial = v.get<bool>();
        } else if (k == "parallel") {
            c.threads = parse_int(v, k);
        } else if (k == "deterministic") {
            if (!v.is_boolean()) config_error("'deterministic' must be a boolean");
            c.deterministic = v.get<bool>();
        } else {
            config_error("unknown config key '" + k + "'");
        }
    }
    if (c.r < 1 || c.L < 1 || std::gcd(c.r, c.L) != 1) config_error("eta = r/L needs coprime positive r and L");
    if (!(c.tau.imag() > 0.0)) config_error("Im tau must be positive");
    if (c.N < 1 || c.N > 12) config_error("N must lie in 1..12");
    if (!std::isfinite(c.kappa.real()) || !std::isfinite(c.kappa.imag())) config_error("kappa must be finite");
    if (c.m < 1) config_error("m must be positive");
    if (c.threads < 1) config_error("parallel must be at least 1");
    return c;
}

Report run(const std::string& subcommand, const RunConfig& config) {
    Report rep;
    Json& body = rep.body;
    body["schema"] = kReportSchema;
    body["subcommand"] = subcommand;
    body["config"] = config_json(config);
    try {
        if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
            config_error("unknown subcommand '" + subcommand + "'");
        const Resolved r = resolve(subcommand, config);
        body["config"] = config_json(r.cfg);
        Json result;
        int code = 0;
        if (subcommand == "verify") result = run_verify(r, code);
        else if (subcommand == "partition") result = run_partition(r);
        else if (subcommand == "scalar-product") result = run_scalar_product(r);
        else if (subcommand == "norm") result = run_norm(r);
        else if (subcommand == "form-factor") result = run_form_factor(r);
        else if (subcommand == "census") result = run_census(r, code);
        else result = run_two_point(r, code);
        rep.exit_code = code;
        body["status"] = code == 0 ? "ok" : code == 4 ? "incomplete" : "failed";
        body["result"] = std::move(result);
    } catch (const PartialCensus& p) {
        rep.exit_code = 4;
        body["status"] = "incomplete";
        body["error"] = {{"kind", error_name(p.kind())}, {"message", p.what()}};
        body["result"] = {{"census", p.census}};
    } catch (const Error& e) {
        rep.exit_code = exit_code_for(e.kind());
        body["status"] = "error";
        body["error"] = {{"kind", error_name(e.kind())}, {"message", e.what()}};
    } catch (const std::exception& e) {
        rep.exit_code = 3;
        body["status"] = "error";
        body["error"] = {{"kind", "InternalError"}, {"message", e.what()}};
    }
    return rep;
}

std::string render(const Json& body) { return body.dump(2) + "\n"; }

}  // namespace csos
