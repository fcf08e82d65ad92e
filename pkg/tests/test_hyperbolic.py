import math
import random
from fractions import Fraction

import pytest

from windingseries.hyperbolic import (bernoulli1, cusp_classes, dpar, geodesic, mobius, reduce_to_F,
                                      split_real_part)
from windingseries.qforms import PreconditionError, QuadForm, _xgcd


def _euler_phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_dpar_equivariance():
    rng = random.Random(1)
    done = 0
    while done < 200:
        f = QuadForm(*[rng.randint(-9, 9) for _ in range(3)])
        p, q = rng.randint(-9, 9), rng.randint(-9, 9)
        if math.gcd(p, q) != 1:
            continue
        _, x, y = _xgcd(p, q)
        g = ((p, -y), (q, x))
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2))
        ref = dpar(f, mobius(g, z))
        assert abs(dpar(f.act(g), z) - ref) < 1e-9 * (1 + abs(ref))
        done += 1


def test_reduce_lands_in_fundamental_domain():
    rng = random.Random(2)
    for _ in range(200):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.01, 2))
        w, g = reduce_to_F(z)
        assert abs(w.real) <= 0.5 + 1e-12 and abs(w) >= 1 - 1e-12
        assert abs(mobius(g, z) - w) < 1e-9


@pytest.mark.parametrize("f", [QuadForm(1, 0, -1), QuadForm(-1, 0, 1), QuadForm(0, 1, 0), QuadForm(0, -1, 0),
                               QuadForm(1, 1, -1), QuadForm(2, 3, -1)])
def test_geodesic_positive_side_on_left(f):
    G = geodesic(f)
    z, dz = G.point_and_velocity(0.3)
    assert abs(dpar(f, z)) < 1e-12
    assert dpar(f, z + 1e-4 * 1j * dz) > 0


def test_closed_geodesic_period():
    G = geodesic(QuadForm(1, 1, -1))
    z0 = G.base_point
    assert abs(mobius(G.automorph, z0) - G.point(G.base_s + G.period)) < 1e-9


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6, 8, 9, 12])
def test_cusp_count_and_widths(N):
    cds = cusp_classes(N)
    assert len(cds) == sum(_euler_phi(math.gcd(c, N // c)) for c in range(1, N + 1) if N % c == 0)
    # widths add up to the index of Gamma0(N)
    index = N
    for p in range(2, N + 1):
        if N % p == 0 and all(p % q for q in range(2, p)):
            index = index * (p + 1) // p
    assert sum(cd.width for cd in cds) == index


def test_bernoulli1_values():
    assert bernoulli1(0) == 0
    assert bernoulli1(Fraction(1, 4)) == Fraction(-1, 4)
    assert bernoulli1(Fraction(5, 4)) == Fraction(-1, 4)
    assert bernoulli1(Fraction(-1, 3)) == Fraction(1, 6)
    assert bernoulli1(0.75) == 0.25


def test_split_real_part_is_centered():
    for f, N in ((QuadForm(0, 2, -1), 1), (QuadForm(1, 3, 2), 1), (QuadForm(0, 5, 2), 1), (QuadForm(2, 3, 1), 2)):
        r, sigma, idx = split_real_part(f, N)
        alpha = cusp_classes(N)[idx].width
        assert -Fraction(alpha, 2) <= r <= Fraction(alpha, 2)
        F = f.act(sigma)
        assert F.a == 0 and F.b < 0 and Fraction(-F.c, F.b) == r


def test_split_real_part_rejects_closed_geodesics():
    with pytest.raises(PreconditionError):
        split_real_part(QuadForm(1, 1, -1))


def test_dpar_rejects_real_points():
    with pytest.raises(ValueError):
        dpar(QuadForm(1, 0, -1), 0.5)
