import math
from fractions import Fraction

import mpmath
import pytest

from windingseries.modfun import ThirdKindForm
from windingseries.qforms import QuadForm
from windingseries.hyperbolic import cusp_classes
from windingseries.theta import (B1, CoeffFn, boundary_prediction, elliptic_points, erfc, g_fun, lower_table,
                                 orbit_sum_near_cusp, periodic_G, psi_tilde0, theta_lower, theta_star,
                                 theta_star_constant, unary_theta_coeffs, unary_theta_eval, unary_theta_lemma)


def _erfc_taylor(x, terms=80):
    s = 0.0
    for n in range(terms):
        s += (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return 1 - 2 / math.sqrt(math.pi) * s


def test_erfc_reference_value():
    assert abs(erfc(1.0) - 0.15729920705028513) < 1e-16


@pytest.mark.parametrize("x", [0.0, 0.1, 0.5, 1.3, 2.0, 2.7])
def test_erfc_against_taylor_series(x):
    assert abs(erfc(x) - _erfc_taylor(x)) < 1e-13


@pytest.mark.parametrize("x", [3.0, 5.5, 9.0, 20.0])
def test_erfc_tail_relative_accuracy(x):
    ref = float(mpmath.erfc(x))
    assert abs(erfc(x) - ref) <= 1e-14 * ref


def test_g_closed_forms():
    w, k = 0.3, 2.0
    assert g_fun(w, k, 0) == pytest.approx(0.5 * erfc(math.sqrt(math.pi * k) * w), rel=1e-15)
    assert g_fun(-w, k, 0) == -g_fun(w, k, 0)
    assert g_fun(w, k, Fraction(1, 2)) == pytest.approx(math.exp(-math.pi * w * w * k) / (2 * math.pi * w))
    with pytest.raises(ValueError):
        g_fun(0.0, k, 0)


@pytest.mark.parametrize("kappa", [0.1, 1.0, 10.0])
def test_periodic_G_symmetries_and_brute_force(kappa):
    for x in (0.11, 0.37, -0.23):
        G = periodic_G(x, kappa)
        assert abs(periodic_G(x + 1, kappa) - G) < 1e-14
        assert abs(periodic_G(-x, kappa) + G) < 1e-14
        brute = mpmath.nsum(lambda n: mpmath.sign(x + n) / 2 * mpmath.erfc(mpmath.sqrt(mpmath.pi * kappa)
                                                                          * abs(x + n)), [-mpmath.inf, mpmath.inf])
        assert abs(G - float(brute)) < 1e-13


def test_periodic_G_small_kappa_limit():
    for x in (0.1, 0.3, -0.45):
        assert abs(periodic_G(x, 1e-4) + B1(x)) < 1e-8


def test_coeff_fn_derivative_and_lowering():
    c = CoeffFn()
    c.add_erfc(1, 2.3, 2)
    c.add_erfc(-1, 0.7)
    low = c.lower()
    for v in (0.5, 1.0, 2.0):
        h = 1e-5
        fd = (c(v + h) - c(v - h)) / (2 * h)
        assert abs(fd - c.derivative(v)) < 1e-8
        assert abs(low(v) - v * v * c.derivative(v)) < 1e-14


def test_coeff_fn_prune_and_json():
    c = CoeffFn()
    c.add_erfc(1, 1.0)
    c.add_erfc(1, 1.0, -1)
    c.add_gauss(0.5, 2.0)
    assert c.prune().erfc_terms == {}
    assert c.to_json() == [{"type": "gauss", "amp": 0.5, "scale": 2.0}]


def test_psi_tilde_sign_and_zero_set():
    f = QuadForm(1, 0, -1)
    assert psi_tilde0(f, 1j) == 0.0
    assert psi_tilde0(f, 2j) < 0 < psi_tilde0(f, 0.5j)
    assert abs(psi_tilde0(f, 1.0001j)) == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("N", [1, 2, 3, 5, 10, 13])
def test_elliptic_points_over_i(N):
    pts = elliptic_points(N)
    index = N
    eps2 = 1 if N % 4 else 0
    for p in range(2, N + 1):
        if N % p == 0 and all(p % q for q in range(2, p)):
            index = index * (p + 1) // p
            if p > 2:
                eps2 *= 1 + (1 if p % 4 == 1 else -1)
    assert sum(w for _, w in pts) == index
    assert sum(1 for _, w in pts if w == 1) == eps2


def test_constant_term_is_L0():
    neg = ThirdKindForm(-1)
    assert theta_star_constant(-3, 1, 1, neg) == Fraction(1, 3)
    assert theta_star_constant(-4, 0, 1, neg) == Fraction(1, 2)
    assert theta_star_constant(-3, 1, 1, ThirdKindForm(1)) == Fraction(-1, 3)


def test_lowered_completion_matches_shadow_table():
    eta = ThirdKindForm(-1)
    star, const = theta_star(-4, 0, 1, eta, 8)
    low = lower_table(star)
    ref = theta_lower(-4, 0, 1, eta, 8)
    for tau in (1j, 0.3 + 0.8j):
        assert abs(low(tau) - ref(tau)) < 1e-12
    assert star.coeffs[0].const == complex(const)


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_unary_coefficients_two_routes(N):
    for idx in range(len(cusp_classes(N))):
        direct = unary_theta_coeffs(idx, N, 10)
        lemma = unary_theta_lemma(idx, N, 10)
        assert set(direct) == set(lemma)
        for k in direct:
            assert abs(direct[k] - math.sqrt(N) * float(lemma[k])) < 1e-12


def test_unary_theta_vanishes_at_level_one():
    assert not unary_theta_coeffs(0, 1, 10)
    assert max(abs(unary_theta_eval(0, 1, 1j))) == 0


def test_boundary_orbit_sum():
    f = QuadForm(0, 3, 1)
    for x in (0.137, -0.31):
        val, tail = orbit_sum_near_cusp(f, 1, 0, x, 10.0)
        assert abs(val - boundary_prediction(f, 1, 0, x)) + tail < 1e-6
