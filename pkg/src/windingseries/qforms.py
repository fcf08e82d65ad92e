"""Integral binary quadratic forms and their Gamma0(N)-classes."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

from sympy.solvers.diophantine.diophantine import diop_DN

Matrix = Tuple[Tuple[int, int], Tuple[int, int]]
IDENTITY: Matrix = ((1, 0), (0, 1))


class PreconditionError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def mat_inv(a: Matrix) -> Matrix:
    (p, q), (r, s) = a
    return ((s, -q), (-r, p))


def mat_pow(a: Matrix, k: int) -> Matrix:
    if k < 0:
        return mat_pow(mat_inv(a), -k)
    out = IDENTITY
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def det(a: Matrix) -> int:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


@dataclass(frozen=True, order=True)
class QuadForm:
    """The form ``a x^2 + b xy + c y^2``."""
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, g: Matrix) -> "QuadForm":
        """Right action ``(f|g)(x, y) = f(g (x, y)^T)``; geodesics move by ``g^-1``."""
        (p, q), (r, s) = g
        a, b, c = self.a, self.b, self.c
        return QuadForm(a * p * p + b * p * r + c * r * r,
                        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
                        a * q * q + b * q * s + c * s * s)

    def __neg__(self) -> "QuadForm":
        return QuadForm(-self.a, -self.b, -self.c)

    def as_list(self) -> List[int]:
        return [self.a, self.b, self.c]


def discriminant(f: QuadForm) -> int:
    return f.disc


def in_gamma0(g: Matrix, N: int) -> bool:
    return det(g) == 1 and g[1][0] % N == 0


def gamma0N_action(g: Matrix, f: QuadForm, N: int = 1) -> QuadForm:
    if not in_gamma0(g, N):
        raise PreconditionError("matrix %r is not in Gamma0(%d)" % (g, N))
    return f.act(g)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_split_hyperbolic(f: QuadForm, N: int = 1) -> bool:
    if f.disc <= 0:
        raise PreconditionError("needs positive discriminant")
    return is_square(f.disc)


# --- Kronecker symbol and genus characters -----------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a/n)`` for arbitrary integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental(D: int) -> bool:
    if D == 1 or D == 0:
        return False
    def squarefree(m):
        m = abs(m)
        p = 2
        while p * p <= m:
            if m % (p * p) == 0:
                return False
            p += 1
        return True
    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


@dataclass(frozen=True)
class GenusCharContext:
    Delta: int
    r: int
    N: int = 1

    def __post_init__(self):
        if self.Delta >= 0 or not is_fundamental(self.Delta):
            raise PreconditionError("Delta=%d is not a negative fundamental discriminant" % self.Delta)
        if (self.r * self.r - self.Delta) % (4 * self.N):
            raise PreconditionError("Delta is not r^2 mod 4N")


def _is_square_mod(x: int, m: int) -> bool:
    x %= m
    return any((y * y - x) % m == 0 for y in range(m))


def _divisor_pairs(N: int):
    return [(d, N // d) for d in range(1, N + 1) if N % d == 0]


def genus_character(ctx: GenusCharContext, f: QuadForm) -> int:
    """Genus character of ``f = [NA, B, C]`` (``N | a`` required, else 0)."""
    N, Delta = ctx.N, ctx.Delta
    if f.a % N:
        return 0
    A, B, C = f.a // N, f.b, f.c
    D = f.disc
    if D % Delta:
        return 0
    if not _is_square_mod(D // Delta, 4 * N):
        return 0
    if math.gcd(math.gcd(math.gcd(A, B), C), Delta) != 1:
        return 0
    bound = 1
    while True:
        for N1, N2 in _divisor_pairs(N):
            g = QuadForm(N1 * A, B, N2 * C)
            for x in range(-bound, bound + 1):
                for y in range(-bound, bound + 1):
                    n = g(x, y)
                    if n != 0 and math.gcd(n, Delta) == 1:
                        return kronecker(Delta, n)
        bound += 1
        if bound > 50:
            raise ResourceError("no represented value prime to Delta found")


# --- Pell equation and automorphs --------------------------------------------

@lru_cache(maxsize=None)
def pell_fundamental(D0: int) -> Tuple[int, int]:
    """Smallest ``(t, u)`` with ``u > 0`` and ``t^2 - D0 u^2 = 4``."""
    if D0 <= 0 or is_square(D0):
        raise PreconditionError("Pell equation needs a positive non-square")
    sols = [(abs(int(t)), abs(int(u))) for t, u in diop_DN(D0, 4) if u != 0]
    if not sols:
        raise ResourceError("no Pell solution found for %d" % D0)
    return min(sols)


def automorph(f: QuadForm, N: int = 1) -> Optional[Matrix]:
    """Generator of the stabilizer of ``f`` in ``Gamma0(N)`` (``None`` if split).

    The sign is fixed so that ``trace > 2``; its direction along the
    geodesic is settled in :mod:`windingseries.hyperbolic`.
    """
    if f.disc <= 0:
        raise PreconditionError("needs positive discriminant")
    if is_split_hyperbolic(f, N):
        return None
    g = f.content
    a0, b0, c0 = f.a // g, f.b // g, f.c // g
    t, u = pell_fundamental(f.disc // (g * g))
    eps = (((t - b0 * u) // 2, -c0 * u), (a0 * u, (t + b0 * u) // 2))
    assert f.act(eps) == f
    m = eps
    for _ in range(1, 4 * N * N + 8):
        if m[1][0] % N == 0:
            if m[0][0] + m[1][1] < 0:
                m = ((-m[0][0], -m[0][1]), (-m[1][0], -m[1][1]))
            return m
        m = mat_mul(m, eps)
    raise ResourceError("no power of the automorph lies in Gamma0(%d)" % N)


# --- SL2(Z) classes -------------------------------------------------------------

def reduced_forms(D: int) -> List[QuadForm]:
    """Gauss-reduced forms of a positive non-square discriminant."""
    sq = math.sqrt(D)
    out = []
    for b in range(1, math.isqrt(D) + 1):
        if (b * b - D) % 4:
            continue
        ac = (b * b - D) // 4
        for a in range(1, -ac + 1):
            if ac % a:
                continue
            for sa in (a, -a):
                c = ac // sa
                if sq - b < 2 * a < sq + b:
                    out.append(QuadForm(sa, b, c))
    return sorted(out)


def rho_step(f: QuadForm) -> Tuple[QuadForm, Matrix]:
    """Neighbour ``[c, b', *]`` of a reduced form and the matrix taking ``f`` to it."""
    D = f.disc
    sq = math.sqrt(D)
    c = f.c
    ac2 = 2 * abs(c)
    # b' = -b + 2 c t, chosen in (sqrt(D) - 2|c|, sqrt(D))
    lo = sq - ac2
    bp = -f.b
    k = math.floor((sq - bp) / ac2)
    bp = bp + k * ac2
    if bp >= sq:
        bp -= ac2
    assert lo < bp < sq
    t = (bp + f.b) // (2 * c)
    g = ((0, -1), (1, t))
    return f.act(g), g


def reduced_cycles(D: int) -> List[List[Tuple[QuadForm, Matrix]]]:
    """Cycles of reduced forms; each entry ``(form, g)`` with ``form = first.act(g)``."""
    remaining = set(reduced_forms(D))
    cycles = []
    while remaining:
        start = min(remaining)
        cyc = [(start, IDENTITY)]
        remaining.discard(start)
        f, g = start, IDENTITY
        while True:
            f2, step = rho_step(f)
            g = mat_mul(g, step)
            if f2 == start:
                break
            remaining.discard(f2)
            cyc.append((f2, g))
            f = f2
        cycles.append(cyc)
    return cycles


def sl2_class_reps(D: int) -> List[QuadForm]:
    if D <= 0:
        raise PreconditionError("only indefinite forms are enumerated")
    if D % 4 in (2, 3):
        return []
    if is_square(D):
        k = math.isqrt(D)
        return [QuadForm(0, k, c) for c in range(k)]
    return [cyc[0][0] for cyc in reduced_cycles(D)]


def _sl2_cycle_members(R: QuadForm) -> List[Tuple[QuadForm, Matrix]]:
    if is_square(R.disc):
        return [(R, IDENTITY)]
    for cyc in reduced_cycles(R.disc):
        if cyc[0][0] == R:
            return cyc
    raise AssertionError("not a cycle leader")


# --- P^1(Z/N) ----------------------------------------------------------------------

def p1_points(N: int) -> List[Tuple[int, int]]:
    """Normalized points of ``P^1(Z/N)``."""
    pts = set()
    for a in range(N):
        for c in range(N):
            if math.gcd(math.gcd(a, c), N) == 1:
                pts.add(p1_normalize((a, c), N))
    return sorted(pts)


def p1_normalize(p: Tuple[int, int], N: int) -> Tuple[int, int]:
    a, c = p[0] % N, p[1] % N
    if N == 1:
        return (0, 0)
    best = None
    for u in range(1, N):
        if math.gcd(u, N) == 1:
            q = ((u * a) % N, (u * c) % N)
            if best is None or q < best:
                best = q
    return best


def lift_column(p: Tuple[int, int], N: int) -> Matrix:
    """An ``SL2(Z)`` matrix whose first column reduces to ``p`` mod ``N``."""
    a, c = p
    if N == 1:
        return IDENTITY
    for k in range(0, 10 * N):
        for aa in (a + k * N, a - k * N):
            if math.gcd(aa, c) == 1 or (c == 0 and abs(aa) == 1):
                cc = c
                if c == 0:
                    cc = N if abs(aa) != 1 else 0
                    if math.gcd(aa, cc) != 1:
                        continue
                g, x, y = _xgcd(aa, cc)
                # aa*x + cc*y = 1 -> [[aa, -y], [cc, x]]
                return ((aa, -y), (cc, x))
    raise AssertionError("no lift found")


def _xgcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def _apply_p1(g: Matrix, p, N):
    return p1_normalize((g[0][0] * p[0] + g[0][1] * p[1], g[1][0] * p[0] + g[1][1] * p[1]), N)


def _sort_key(f: QuadForm):
    return (abs(f.a), f.a, abs(f.b), f.b, f.c)


def _normalize_translate(f: QuadForm, N: int) -> QuadForm:
    """Best ``T^n`` translate (``T`` lies in every ``Gamma0(N)``)."""
    if f.a == 0:
        if f.b == 0:
            return f
        k = abs(f.b)
        # [0, b, c] -> [0, b, c + b n]
        return QuadForm(0, f.b, f.c % k)
    best = f
    n0 = -f.b // (2 * f.a)
    for n in range(n0 - 2, n0 + 3):
        g = f.act(((1, n), (0, 1)))
        if _sort_key(g) < _sort_key(best):
            best = g
    return best


@dataclass(frozen=True)
class FormClass:
    rep: QuadForm
    sl2_rep: QuadForm
    points: Tuple[Tuple[int, int], ...]


def enumerate_classes(N: int, D: int) -> List[QuadForm]:
    return [fc.rep for fc in enumerate_form_classes(N, D)]


@lru_cache(maxsize=None)
def _enumerate_cached(N: int, D: int) -> Tuple[FormClass, ...]:
    out = []
    pts = p1_points(N)
    for R in sl2_class_reps(D):
        eps = automorph(R, 1) if not is_square(D) else None
        good = [p for p in pts if R(*p) % N == 0] if N > 1 else [(0, 0)]
        seen = set()
        members = _sl2_cycle_members(R)
        for p in good:
            if p in seen:
                continue
            orbit = [p]
            seen.add(p)
            if eps is not None and N > 1:
                q = _apply_p1(eps, p, N)
                while q != p:
                    orbit.append(q)
                    seen.add(q)
                    q = _apply_p1(eps, q, N)
            orbit_set = set(orbit)
            cands = []
            for Ri, hi in members:
                for q in pts if N > 1 else [(0, 0)]:
                    g = lift_column(q, N)
                    if N > 1 and _apply_p1(hi, q, N) not in orbit_set:
                        continue
                    F = Ri.act(g)
                    if F.a % N == 0:
                        cands.append(_normalize_translate(F, N))
            rep = min(cands, key=_sort_key)
            out.append(FormClass(rep, R, tuple(sorted(orbit))))
    out.sort(key=lambda fc: _sort_key(fc.rep))
    return tuple(out)


def enumerate_form_classes(N: int, D: int) -> List[FormClass]:
    """Representatives of ``Gamma0(N) \\ Q_{N,D}`` for ``D > 0``.

    Classes are the orbits of the automorph group of each ``SL2(Z)``-class
    representative ``R`` on the points ``p`` of ``P^1(Z/N)`` with
    ``R(p) = 0 mod N``.  The reported representative is the smallest
    member found under the key ``(|A|, A, |B|, B, C)``; this is a repo
    convention.
    """
    if D <= 0:
        raise PreconditionError("D must be positive")
    if D % 4 in (2, 3):
        warnings.warn("discriminant %d is not 0,1 mod 4" % D, stacklevel=2)
        return []
    return list(_enumerate_cached(N, D))


def sl2_reduce_form(f: QuadForm) -> Tuple[QuadForm, Matrix]:
    """Return ``(R, g)`` with ``R`` a class leader and ``f.act(g) == R``."""
    D = f.disc
    if D <= 0:
        raise PreconditionError("needs positive discriminant")
    if is_square(D):
        k = math.isqrt(D)
        g = _split_to_infinity(f)
        F = f.act(g)
        s = -(F.c // k)
        g = mat_mul(g, ((1, s), (0, 1)))
        F = F.act(((1, s), (0, 1)))
        assert F.a == 0 and F.b == k and 0 <= F.c < k, F
        return F, g
    g = IDENTITY
    F = f
    sq = math.sqrt(D)
    for _ in range(100000):
        if 0 < F.b < sq and sq - F.b < 2 * abs(F.a) < sq + F.b:
            break
        c = F.c
        ac2 = 2 * abs(c)
        bp = -F.b
        if abs(c) >= sq:
            # b' = -b mod 2c in (-|c|, |c|]
            bp = (bp + abs(c)) % ac2 - abs(c)
            if bp == -abs(c):
                bp = abs(c)
        else:
            # b' = -b mod 2c in (sqrt(D) - 2|c|, sqrt(D))
            k = math.floor((sq - bp) / ac2)
            bp += k * ac2
            if bp >= sq:
                bp -= ac2
        t = (bp + F.b) // (2 * c)
        step = ((0, -1), (1, t))
        F = F.act(step)
        g = mat_mul(g, step)
    else:
        raise ResourceError("reduction did not terminate")
    for cyc in reduced_cycles(D):
        for Ri, hi in cyc:
            if Ri == F:
                # F = lead.act(hi), so lead = F.act(hi^-1)
                g = mat_mul(g, mat_inv(hi))
                assert f.act(g) == cyc[0][0]
                return cyc[0][0], g
    raise AssertionError("reduced form not found in cycles")


_S: Matrix = ((0, -1), (1, 0))


def _split_to_infinity(f: QuadForm) -> Matrix:
    """Matrix ``g`` with ``f.act(g) = [0, k, *]``, ``k = sqrt(disc) > 0``."""
    k = math.isqrt(f.disc)
    if f.a == 0 and f.b > 0:
        return IDENTITY
    if f.a == 0:
        f1 = f.act(_S)
        if f1.a == 0:
            return _S
        return mat_mul(_S, _split_to_infinity(f1))
    for sgn in (1, -1):
        num, den = -f.b + sgn * k, 2 * f.a
        g0 = math.gcd(num, den)
        p, q = num // g0, den // g0
        _, x, y = _xgcd(p, q)
        g = ((p, -y), (q, x))
        F = f.act(g)
        if F.a == 0 and F.b > 0:
            return g
    raise AssertionError("no rational root found")


def gamma0_equivalent(f1: QuadForm, f2: QuadForm, N: int) -> bool:
    """Exact test whether ``f2 = f1.act(gamma)`` for some ``gamma`` in ``Gamma0(N)``."""
    if f1.disc != f2.disc:
        return False
    R1, g1 = sl2_reduce_form(f1)
    R2, g2 = sl2_reduce_form(f2)
    if R1 != R2:
        return False
    if N == 1:
        return True
    # f_i = R.act(g_i^-1); equivalent iff some automorph maps the points
    p1 = p1_normalize((mat_inv(g1)[0][0], mat_inv(g1)[1][0]), N)
    p2 = p1_normalize((mat_inv(g2)[0][0], mat_inv(g2)[1][0]), N)
    if is_square(R1.disc):
        return p1 == p2
    eps = automorph(R1, 1)
    q = p1
    for _ in range(4 * N * N + 4):
        if q == p2:
            return True
        q = _apply_p1(eps, q, N)
    return False
