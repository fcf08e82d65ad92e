import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from windingseries.lattice import (MetaplecticElement, apply_rho_S, e, frac_mod1, gamma0_discriminant_form,
                                   rho_S, rho_T, slash_action, twisted_discriminant_form)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6])
def test_gamma0_module_values(N):
    dL = gamma0_discriminant_form(N)
    assert dL.order == 2 * N
    assert dL.signature == (2, 1)
    for h in dL.elements:
        assert dL.Q(h) == frac_mod1(Fraction(h[0] ** 2, 4 * N))
        for mu in dL.elements:
            assert dL.bilinear(h, mu) == dL.bilinear(mu, h) == frac_mod1(Fraction(h[0] * mu[0], 2 * N))


def test_twisted_module_order_and_signature():
    dD = twisted_discriminant_form(1, -3)
    assert dD.order == 3 * 6 * 3
    assert dD.signature == (1, 2)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_S_squared_is_the_central_involution(N):
    # rho(S)^2 e_h = e(-(b+ - b-)/4) e_{-h}
    dL = gamma0_discriminant_form(N)
    S = rho_S(dL)
    Z = np.zeros_like(S)
    for h in dL.elements:
        Z[dL.index(dL.neg(h)), dL.index(h)] = e(Fraction(-1, 4))
    assert np.max(np.abs(S @ S - Z)) < 1e-13


def test_sparse_S_matches_dense():
    dL = gamma0_discriminant_form(3)
    S = rho_S(dL)
    vec = {(1,): 2.0, (4,): -1j}
    out = apply_rho_S(dL, vec)
    dense = S @ np.array([vec.get(h, 0) for h in dL.elements])
    assert max(abs(out[h] - dense[dL.index(h)]) for h in dL.elements) < 1e-14


def test_T_is_diagonal_of_Q():
    dL = gamma0_discriminant_form(2)
    assert np.allclose(np.diag(rho_T(dL)), [e(Fraction(b * b, 8)) for b in range(4)])


def test_metaplectic_action_matrix():
    g = MetaplecticElement("STS")
    (a, b), (c, d) = g.matrix
    tau = 0.3 + 1.7j
    z, phi = g.act(tau)
    assert abs(z - (a * tau + b) / (c * tau + d)) < 1e-14
    assert abs(phi * phi - (c * tau + d)) < 1e-13 or abs(phi * phi + (c * tau + d)) < 1e-13


def test_slash_cocycle():
    # (f|g1)|g2 = f|(g1 g2) for a vector valued test function
    def f(t):
        return np.array([cmath.exp(1j * t), t * t])
    g1, g2 = MetaplecticElement("ST"), MetaplecticElement("tS")
    tau = -0.2 + 1.3j
    lhs = slash_action(lambda t: slash_action(f, Fraction(3, 2), g1, t), Fraction(3, 2), g2, tau)
    rhs = slash_action(f, Fraction(3, 2), g1 * g2, tau)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_e_reduces_fraction():
    assert abs(e(Fraction(7, 4)) - 1j * -1) < 1e-15
    assert abs(e(0.5) + 1) < 1e-15
    assert math.isclose(abs(e(Fraction(1, 3))), 1.0)


def test_slash_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        slash_action(lambda t: np.zeros(1), Fraction(1, 2), MetaplecticElement("S"), -1j)
