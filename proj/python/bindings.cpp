// Thin Python surface: the report-producing entry point plus a few primitives for
// interactive checks. Reports cross the boundary as JSON text to keep one serializer.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csos/app.hpp"
#include "csos/oracle.hpp"

namespace py = pybind11;
using namespace csos;

namespace {

py::tuple run_json(const std::string& subcommand, const std::string& config_json) {
    Report r;
    try {
        r = run(subcommand, parse_config(Json::parse(config_json)));
    } catch (const Error& e) {
        r.exit_code = 2;
        r.body = Json{{"schema", kReportSchema}, {"status", "error"}, {"error", {{"kind", error_name(e.kind())}, {"message", e.what()}}}};
    } catch (const Json::parse_error& e) {
        r.exit_code = 2;
        r.body = Json{{"schema", kReportSchema}, {"status", "error"}, {"error", {{"kind", "ConfigError"}, {"message", e.what()}}}};
    }
    return py::make_tuple(r.exit_code, render(r.body));
}

}  // namespace

PYBIND11_MODULE(_csos, m) {
    m.doc() = "Numerical engine for the cyclic SOS model";
    py::register_exception<Error>(m, "CsosError");

    m.attr("REPORT_SCHEMA") = kReportSchema;
    m.attr("SUBCOMMANDS") = kSubcommands;

    m.def("run_json", &run_json, py::arg("subcommand"), py::arg("config_json"),
          "Run a subcommand on a JSON config; returns (exit_code, rendered report).");

    m.def(
        "theta1", [](cplx z, cplx tau) { return theta1_eval(z, tau, 1e-16, 64).value; }, py::arg("z"), py::arg("tau"));
    m.def(
        "bracket",
        [](cplx u, int r, int L, cplx tau) { return br(u, EllipticContext(r, L, tau)); }, py::arg("u"), py::arg("r"),
        py::arg("L"), py::arg("tau"));
    m.def(
        "partition_function",
        [](const CList& u, const CList& xi, cplx s, int r, int L, cplx tau, bool brute_force) {
            const EllipticContext ctx(r, L, tau);
            return brute_force ? partition_function_bf(u, xi, s, ctx)
                               : partition_det(u, xi, s, {}, PartitionVariant::Z1, ctx);
        },
        py::arg("u"), py::arg("xi"), py::arg("s"), py::arg("r") = 1, py::arg("L") = 5, py::arg("tau") = cplx(0.0, 0.8),
        py::arg("brute_force") = false);
}
