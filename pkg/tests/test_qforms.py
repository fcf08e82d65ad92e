import math
import random

import pytest
from sympy import jacobi_symbol

from windingseries.qforms import (GenusCharContext, PreconditionError, QuadForm, automorph, enumerate_classes,
                                  gamma0_equivalent, genus_character, in_gamma0, is_fundamental,
                                  is_split_hyperbolic, kronecker)


def _random_gamma0(rng, N, size=6):
    while True:
        c = N * rng.randint(-size, size)
        d = rng.randint(-size, size)
        if math.gcd(c, d) != 1:
            continue
        if c == 0:
            return ((d, rng.randint(-3, 3)), (0, d))
        a = pow(d, -1, abs(c)) + abs(c) * rng.randint(-2, 2)
        return ((a, (a * d - 1) // c), (c, d))


def _classes_by_union_find(D, box):
    """SL2(Z) classes of discriminant D via connected components under S and T^{+-1}."""
    forms = set()
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            if a == 0 or (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if abs(c) <= box:
                forms.add((a, b, c))
    parent = {f: f for f in forms}

    def find(f):
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f
    for a, b, c in forms:
        for g in ((c, -b, a), (a, b + 2 * a, a + b + c), (a, b - 2 * a, a - b + c)):
            if g in parent:
                parent[find(g)] = find((a, b, c))
    sq = math.sqrt(D)
    reduced = [f for f in forms if 0 < f[1] < sq and sq - f[1] < 2 * abs(f[0]) < sq + f[1]]
    return len({find(f) for f in reduced})


def test_kronecker_matches_jacobi_on_odd_moduli():
    for D in (-3, -4, -7, -8, -15, -20, 5, 12):
        for n in range(1, 60, 2):
            assert kronecker(D, n) == jacobi_symbol(D, n)


def test_kronecker_at_two():
    # (D/2) = 0 for even D, else +1 when D = +-1 mod 8 and -1 when D = +-3 mod 8
    assert kronecker(-4, 2) == 0
    assert kronecker(-7, 2) == 1
    assert kronecker(-3, 2) == -1


def test_fundamental_discriminants_small():
    found = [D for D in range(-1, -31, -1) if is_fundamental(D)]
    assert found == [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]


@pytest.mark.parametrize("D", [5, 8, 12, 13, 17, 21, 24, 28, 33, 37, 40, 41, 44, 45, 52, 56, 60])
def test_class_count_level_one_matches_union_find(D):
    assert len(enumerate_classes(1, D)) == _classes_by_union_find(D, D + 4)


def test_class_representatives_lie_in_QN():
    for N in (2, 3, 4, 6):
        for D in (5, 9, 12, 16, 21):
            for f in enumerate_classes(N, D):
                assert f.a % N == 0 and f.disc == D


def test_random_translates_hit_exactly_one_class():
    rng = random.Random(7)
    for N, D in ((2, 12), (3, 21), (4, 9), (1, 45)):
        reps = enumerate_classes(N, D)
        for f in reps:
            for _ in range(8):
                g = _random_gamma0(rng, N)
                assert in_gamma0(g, N)
                hits = [r for r in reps if gamma0_equivalent(f.act(g), r, N)]
                assert hits == [f]


def test_genus_character_is_a_class_function():
    rng = random.Random(3)
    for Delta, r, N in ((-3, 1, 1), (-4, 0, 1), (-3, 3, 3), (-4, 2, 2)):
        ctx = GenusCharContext(Delta, r, N)
        for d in (3, 4, 7, 8):
            for f in enumerate_classes(N, -d * Delta):
                chi = genus_character(ctx, f)
                assert chi in (-1, 0, 1)
                for _ in range(50):
                    assert genus_character(ctx, f.act(_random_gamma0(rng, N))) == chi


def test_genus_character_on_degenerate_forms_is_kronecker():
    ctx = GenusCharContext(-3, 1, 1)
    for C in range(1, 40):
        if math.gcd(C, 3) == 1:
            assert genus_character(ctx, QuadForm(0, 0, C)) == kronecker(-3, C)


def test_genus_context_rejects_bad_input():
    with pytest.raises(PreconditionError):
        GenusCharContext(-12, 0, 1)
    with pytest.raises(PreconditionError):
        GenusCharContext(-3, 0, 1)


def test_split_hyperbolic():
    assert is_split_hyperbolic(QuadForm(0, 2, 0))
    assert not is_split_hyperbolic(QuadForm(1, 1, -1))
    assert is_split_hyperbolic(QuadForm(1, 6, 0))


def test_automorph_fixes_form():
    for f, N in ((QuadForm(1, 1, -1), 1), (QuadForm(2, 3, -1), 2), (QuadForm(3, 3, -2), 3)):
        g = automorph(f, N)
        assert f.act(g) == f
        assert abs(g[0][0] + g[1][1]) > 2
        assert in_gamma0(g, N)
    assert automorph(QuadForm(0, 3, 1), 1) is None
