import cmath
from fractions import Fraction

import numpy as np
import pytest

from windingseries.hyperbolic import cusp_classes
from windingseries.lattice import MetaplecticElement, slash_action
from windingseries.mock import (DEN, Cusp, GradedSeries, Point, Sig21Lattice, eichler_integral, lowering_op,
                                mock_theta_f, mock_theta_omega, shimura_block, twisted_hol_coeff, xi_op,
                                zwegers_hol_coeff, zwegers_theta, zwegers_vector)

# q-expansions of the third order mock theta functions f(q) and omega(q), listed by hand
F_COEFFS = [1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11, 13, -17, 20]
OMEGA_COEFFS = [1, 2, 3, 4, 6, 8, 10, 14, 18, 22, 29, 36, 44, 56, 68, 82]


@pytest.mark.parametrize("route", ["direct", "nested"])
def test_mock_theta_f(route):
    assert mock_theta_f(len(F_COEFFS), route) == F_COEFFS


@pytest.mark.parametrize("route", ["direct", "nested"])
def test_mock_theta_omega(route):
    assert mock_theta_omega(len(OMEGA_COEFFS), route) == OMEGA_COEFFS


def test_routes_agree_far_out():
    assert mock_theta_f(120) == mock_theta_f(120, "nested")
    assert mock_theta_omega(120) == mock_theta_omega(120, "nested")


@pytest.mark.parametrize("k", [Fraction(1, 2), Fraction(-1, 2)])
def test_xi_of_eichler_integral_is_the_shadow(k):
    g = {1: 1.0, 2: -0.5 + 0.2j, 5: 0.3}
    for tau in (0.2 + 0.9j, -0.35 + 1.4j):
        lhs = xi_op(lambda t: np.array([eichler_integral(g, k, t)]), k, tau)[0]
        rhs = sum(b * cmath.exp(2j * cmath.pi * n * tau) for n, b in g.items())
        assert abs(lhs - rhs) < 1e-7


def test_eichler_integral_rejects_non_cusp_shadow():
    with pytest.raises(ValueError):
        eichler_integral({0: 1.0}, Fraction(1, 2), 1j)


def test_lowering_closed_form():
    tau = 0.1 + 0.9j
    # L(v^s) = s v^(s+1)
    assert abs(lowering_op(lambda t: np.array([t.imag ** -1.5]), tau)[0] + 1.5 * 0.9 ** -0.5) < 1e-8


def test_lattice_signature():
    for N in (1, 2, 5):
        assert Sig21Lattice(N).signature == (2, 1)


def test_zwegers_antisymmetry_and_diagonal():
    lat = Sig21Lattice(2)
    c1, c2 = Point(0.3 + 0.6j), Cusp(0)
    for h in range(4):
        for D in range(0, 30):
            m = Fraction(D, 8)
            assert zwegers_hol_coeff(lat, c1, c2, h, m) == -zwegers_hol_coeff(lat, c2, c1, h, m)
        assert zwegers_theta(lat, c1, c1, h, 1j) == 0


@pytest.mark.parametrize("N", [2, 3, 5])
def test_zwegers_S_transformation(N):
    lat = Sig21Lattice(N)
    S = MetaplecticElement("S")
    c1, c2 = Point(0.37 + 0.41j), Cusp(len(cusp_classes(N)) - 1)

    def F(t):
        return zwegers_vector(lat, c1, c2, t)
    tau = 0.25 + 1.05j
    assert np.max(np.abs(slash_action(F, Fraction(3, 2), S, tau) - S.rho(lat.dform) @ F(tau))) < 1e-6


def test_untwisted_level_one_is_trivial():
    lat = Sig21Lattice(1)
    assert all(zwegers_hol_coeff(lat, Point(1j), Cusp(0), h, Fraction(D, 4)) == 0
               for h in (0, 1) for D in range(40))


def test_twisted_coefficient_is_minus_the_jlog_trace():
    # the dlog(j - 1728) trace at d = 3 is -10/3
    assert twisted_hol_coeff(-3, 1, 1, Point(1j), Cusp(0), 3) == Fraction(10, 3)


def test_graded_series_arithmetic():
    a = GradedSeries({-1: Fraction(1), 23: Fraction(2)}, 48)
    b = GradedSeries({1: Fraction(3)}, 48)
    assert (a * b).coeffs == {0: 3, 24: 6}
    assert (a - a).coeffs == {}
    assert a.min_exponent == Fraction(-1, DEN)
    assert a.to_json() == {"denominator": 24, "coeffs": [{"num": -1, "value": "1"}, {"num": 23, "value": "2"}]}


def test_shimura_block_structure():
    blk = shimura_block(48)
    assert len(blk["mus"]) == 144
    assert len(blk["fibers"]) == 72 and all(len(v) == 2 for v in blk["fibers"].values())
    mins = [m for m in blk["min_exponents"].values() if m is not None]
    assert mins and min(mins) > 0
    sigma = blk["sigma"]
    assert all(sigma(sigma(k)) == k for k in range(12))
    # vartheta_N is odd under mu -> -mu, and its sigma-antisymmetrization lives off 3 | k
    vt = blk["vartheta_N"]
    assert all(vt[(12 - k) % 12] == {j: -c for j, c in vt[k].items()} for k in range(12))
    support = [k for k in range(12) if vt[k] != vt[sigma(k)]]
    assert support == [1, 2, 4, 5, 7, 8, 10, 11]


def test_shimura_block_precision_guard():
    with pytest.raises(ValueError):
        shimura_block(10)
