#include "csos/app.hpp"
#include "fixtures.hpp"

using namespace csos;

TEST_CASE("complex lists parse from the command-line syntax") {
    const CList z = parse_complex_list("0.3, 1-2i, -0.5+0.25i, 2i, -i, 1e-3+1e-2i");
    REQUIRE(z.size() == 6);
    CHECK(z[0] == cplx(0.3, 0.0));
    CHECK(z[1] == cplx(1.0, -2.0));
    CHECK(z[2] == cplx(-0.5, 0.25));
    CHECK(z[3] == cplx(0.0, 2.0));
    CHECK(z[4] == cplx(0.0, -1.0));
    CHECK(z[5] == cplx(1e-3, 1e-2));
    CHECK_THROWS_AS(parse_complex_list("1+x"), Error);
    CHECK_THROWS_AS(parse_complex_list(""), Error);
}

TEST_CASE("config validation rejects rather than repairs") {
    auto code = [](const Json& j) {
        try {
            parse_config(j);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::SingularPoint;
    };
    CHECK(code(Json{{"eta", {{"r", 2}, {"L", 4}}}}) == ErrorKind::ConfigError);
    CHECK(code(Json{{"tau", {0.0, -1.0}}}) == ErrorKind::ConfigError);
    CHECK(code(Json{{"N", 0}}) == ErrorKind::ConfigError);
    CHECK(code(Json{{"unknown", 1}}) == ErrorKind::ConfigError);
    CHECK(code(Json{{"xi", "everywhere"}}) == ErrorKind::ConfigError);
    CHECK(code(Json{{"tolerances", {{"min_step", -1.0}}}}) == ErrorKind::ConfigError);
    CHECK_NOTHROW(parse_config(Json{{"N", 4}, {"kappa", {0.3, 0.1}}, {"xi", "random"}}));
}

TEST_CASE("explicit inputs that fail lattice validation give exit code 2") {
    RunConfig c = parse_config(Json{{"xi", {{0.3, 0.4}, {5.3, 0.4}}}, {"s0", {0.43, 0.61}}});
    const Report r = run("census", c);
    CHECK(r.exit_code == 2);
    CHECK(r.body["error"]["kind"] == "ConfigError");
    CHECK(run("census", parse_config(Json{{"N", 3}})).exit_code == 2);
    CHECK(run("no-such-command", RunConfig{}).exit_code == 2);
}

TEST_CASE("reports are byte-identical for the same config and seed") {
    RunConfig c = parse_config(Json{{"N", 2}, {"seed", 17}, {"kappa", 0.3}, {"m", 1}});
    const std::string a = render(run("two-point", c).body);
    const std::string b = render(run("two-point", c).body);
    CHECK(a == b);
    c.threads = 3;
    const Report p = run("census", c);
    c.threads = 1;
    const Report q = run("census", c);
    CHECK(render(p.body["result"]) == render(q.body["result"]));
    c.seed = 18;
    CHECK(render(run("two-point", c).body) != a);
}

TEST_CASE("reports carry the schema, the resolved config and [re, im] numbers") {
    const Report r = run("census", parse_config(Json{{"N", 2}, {"seed", 5}, {"kappa", 0.1}}));
    CHECK(r.exit_code == 0);
    CHECK(r.body["schema"] == "csos-lab/1");
    const Json& cfg = r.body["config"];
    REQUIRE(cfg["xi"].is_array());
    CHECK(cfg["xi"].size() == 2);
    CHECK(cfg["xi"][0].size() == 2);
    CHECK(cfg["s0"].is_array());
    CHECK(r.body["result"]["found"] == 10);
    CHECK(r.body["result"]["summary"] == "10 solutions, 0 defects");
    CHECK(r.body["result"]["solutions"][0]["omega"].size() == 2);
}

TEST_CASE("the resolved config replays to the same report") {
    const Report first = run("norm", parse_config(Json{{"N", 2}, {"seed", 9}, {"bra", 3}}));
    REQUIRE(first.exit_code == 0);
    Json replay = first.body["config"];
    RunConfig again = parse_config(replay);
    const Report second = run("norm", again);
    CHECK(render(second.body["result"]) == render(first.body["result"]));
}

TEST_CASE("a starved solver yields an incomplete census with exit code 4 and a partial report") {
    RunConfig c = parse_config(Json{{"N", 2}, {"seed", 5}, {"kappa", 0.9}, {"tolerances", {{"step_budget", 2}}}});
    const Report r = run("census", c);
    CHECK(r.exit_code == 4);
    CHECK(r.body["status"] == "incomplete");
    CHECK(r.body["result"]["complete"] == false);
    CHECK(r.body["result"]["failures"].size() > 0);
}

TEST_CASE("partition, scalar-product and form-factor runs agree with their oracles") {
    const Report p = run("partition", parse_config(Json{{"N", 3}, {"seed", 4}}));
    REQUIRE(p.exit_code == 0);
    CHECK(p.body["result"]["Z1"]["relative_error"].get<double>() < 1e-9);
    CHECK(p.body["result"]["Z2"]["relative_error"].get<double>() < 1e-9);

    const Report s = run("scalar-product", parse_config(Json{{"N", 4}, {"seed", 4}, {"v", "random"}, {"omega_branch", 2}}));
    REQUIRE(s.exit_code == 0);
    CHECK(s.body["result"]["relative_error"].get<double>() < 1e-9);

    const Report f = run("form-factor", parse_config(Json{{"N", 2}, {"seed", 4}, {"bra", 0}, {"ket", 3}, {"site", 2},
                                                          {"operator", "E_mm"}}));
    REQUIRE(f.exit_code == 0);
    CHECK(f.body["result"]["relative_error"].get<double>() < 1e-8);
}

TEST_CASE("verify passes on the default configuration") {
    const Report r = run("verify", parse_config(Json{{"N", 2}, {"seed", 1}}));
    for (const auto& c : r.body["result"]["checks"]) {
        INFO(c.dump());
        CHECK(c["pass"] == true);
    }
    CHECK(r.exit_code == 0);
}
