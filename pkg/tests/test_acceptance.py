"""The ten acceptance criteria, each at its stated tolerance.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary.  Running this file as a script prints them directly.
"""
import math
from fractions import Fraction

import pytest

from windingseries import verify
from windingseries.theta import periodic_G, B1


def test_criterion_01_class_number_formula(record_criterion):
    r = verify.check_class_numbers()
    record_criterion(r)
    assert r.details["discriminants"] > 50
    assert r.details["mismatches"] == []


def test_criterion_02_trace_routes_agree(record_criterion):
    r = verify.check_trace_routes(d_max=20)
    record_criterion(r)
    assert r.residual < 1e-6
    assert len(r.details["rows"]) >= 10


def test_criterion_03_lowering(record_criterion):
    r = verify.check_lowering()
    record_criterion(r)
    assert r.details["symbolic_rule"] is True
    assert r.details["termwise"] < 1e-12
    assert r.details["finite_difference"] < 1e-7


def test_criterion_04_siegel_theta(record_criterion):
    r = verify.check_siegel()
    record_criterion(r)
    assert r.residual < 1e-8


def test_criterion_05_weil_representation(record_criterion):
    r = verify.check_weil()
    record_criterion(r)
    assert [row["N"] for row in r.details["rows"]] == [1, 2, 3, 4]
    assert r.residual < 1e-12


def test_criterion_06_unary_theta(record_criterion):
    r = verify.check_unary()
    record_criterion(r)
    assert r.details["coefficient_routes_agree"]
    assert r.details["transformation"] + r.details["tail_bound"] < 1e-8


def test_criterion_07_periodic_G(record_criterion):
    r = verify.check_periodic_G()
    record_criterion(r)
    assert r.details["grid"] < 1e-10
    assert r.details["limit_kappa_1e-4"] < 1e-8


@pytest.mark.xfail(strict=True, reason="G(x; kappa, 0) tends to 0, not -B1, as kappa grows")
def test_criterion_07_literal_large_kappa_reading():
    xs = [(k + 0.5) / 20 - 0.5 + 0.013 for k in range(20)]
    assert max(abs(periodic_G(x, 1e4) + B1(x)) for x in xs) < 1e-8


def test_criterion_08_zwegers_theta(record_criterion):
    r = verify.check_zwegers()
    record_criterion(r)
    assert r.details["antisymmetry_exact"]
    assert r.details["S_residual"] < 1e-6
    assert r.details["genus_zero_trace"] < 1e-6


def test_criterion_09_cancellation(record_criterion):
    r = verify.check_shimura()
    record_criterion(r)
    assert r.details["mock_f_routes"] and r.details["mock_omega_routes"]
    assert Fraction(r.details["smallest_exponent"]) > 0
    assert r.passed


def test_criterion_10_boundary_asymptotics(record_criterion):
    r = verify.check_boundary()
    record_criterion(r)
    split_forms = {tuple(row["form"]) for row in r.details["rows"]}
    assert len(split_forms) >= 2
    assert all(math.isqrt(b * b - 4 * a * c) ** 2 == b * b - 4 * a * c for a, b, c in split_forms)
    assert r.residual < 1e-6


if __name__ == "__main__":
    for res in verify.run_all():
        print(res.line())
