import json

import pytest

csos = pytest.importorskip("csos")


def test_theta_is_odd_and_antiperiodic():
    tau = 0.8j
    z = 0.2 + 0.3j
    assert abs(csos.theta1(-z, tau) + csos.theta1(z, tau)) < 1e-14
    assert abs(csos.theta1(z + 1, tau) + csos.theta1(z, tau)) < 1e-14


def test_theta_frozen_value():
    got = csos.theta1(0.2 + 0.3j, 0.7j)
    assert abs(got - complex(0.88817542889468615, 1.0530339398284199)) < 1e-13


def test_partition_function_routes_agree():
    u = [0.9 + 0.3j, 1.6 + 0.2j]
    xi = [0.31 + 0.42j, 1.27 + 0.18j]
    s = 0.43 + 0.61j
    det = csos.partition_function(u, xi, s)
    bf = csos.partition_function(u, xi, s, brute_force=True)
    assert abs(det - bf) < 1e-9 * abs(bf)


def test_census_report():
    code, report = csos.run("census", {"N": 2, "seed": 3, "kappa": 0.2})
    assert code == 0
    assert report["schema"] == csos.REPORT_SCHEMA
    assert report["result"]["found"] == 10
    omega = csos.as_complex(report["result"]["solutions"][0]["omega"])
    assert abs(abs(omega) - 1.0) < 1e-12


def test_reports_are_deterministic():
    cfg = {"N": 2, "seed": 21, "kappa": 0.4, "m": 1}
    text = json.dumps(cfg)
    assert csos.run_json("two-point", text) == csos.run_json("two-point", text)


def test_config_errors_exit_2():
    code, report = csos.run("census", {"N": 3})
    assert code == 2
    assert report["error"]["kind"] == "ConfigError"
    code, _ = csos.run("census", {"bogus": True})
    assert code == 2
