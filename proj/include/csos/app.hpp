#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csos/checks.hpp"

namespace csos {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "csos-lab/1";

// A list or single complex parameter that may be left for the seeded draw.
struct ComplexParam {
    bool random = true;
    CList values;
};

// Selects a κ=1 census solution: the max-modulus ground state, an index into the
// census order, or an explicit seed label.
struct StateSelector {
    enum class Kind { ground, index, label };
    Kind kind = Kind::ground;
    int index = 0;
    SeedLabel label;
};

struct RunConfig {
    int r = 1;
    int L = 5;
    cplx tau{0.0, 0.8};
    int N = 2;
    ComplexParam xi;
    ComplexParam s0;
    std::uint64_t seed = 1;
    cplx kappa{0.1, 0.0};
    int m = 1;
    std::string output;
    SolverOptions solver;
    double theta_tolerance = 1e-16;
    int theta_max_terms = 64;

    // partition
    ComplexParam u;
    ComplexParam s;
    // scalar-product, norm, form-factor, two-point
    StateSelector bra;
    StateSelector ket{StateSelector::Kind::index, 1, {}};
    ComplexParam v{false, {}};  // empty and not random: use the ket selector
    int omega_branch = 0;
    int site = 1;
    FormFactorOp op = FormFactorOp::sigma_z;
    bool polynomial = false;

    int threads = 1;
    bool deterministic = false;
};

// Rejects unknown keys, wrong types and values outside the model's domain with ConfigError.
RunConfig parse_config(const Json& j);
// "a+bi, c-di" style lists for command-line overrides; ConfigError on malformed input.
CList parse_complex_list(const std::string& text);

Json to_json(cplx z);
Json to_json(const CList& zs);

struct Report {
    int exit_code = 0;
    Json body;
};

inline const std::vector<std::string> kSubcommands = {"verify",      "partition", "scalar-product", "norm",
                                                      "form-factor", "census",    "two-point"};

// Draws the random parameters, validates, runs, and maps errors to exit codes
// (2 ConfigError, 3 numerical failure, 4 incomplete census with a partial report,
// 1 when verify finds a failing check).
Report run(const std::string& subcommand, const RunConfig& config);

// Stable serialization: ordered keys, two-space indent, trailing newline.
std::string render(const Json& body);

}  // namespace csos
