"""Geodesics, cusps and fundamental-domain reduction on the upper half-plane.

Orientation: ``c_X`` is travelled so that ``d(X, z) > 0`` lies on its left.
For semicircles this means clockwise when ``A > 0``; vertical lines run
upward iff ``B < 0``.  The endpoint is ``l_X = (-B + sqrt D) / 2A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Tuple

from .qforms import (IDENTITY, Matrix, PreconditionError, QuadForm, _xgcd, automorph,
                     is_split_hyperbolic, mat_inv, mat_mul)


class PrecisionError(ArithmeticError):
    pass


INF = None  # the cusp at infinity


def mobius(g: Matrix, z: complex) -> complex:
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


def dpar(f: QuadForm, z: complex) -> float:
    """``d(X, z) = (A|z|^2 + B Re z + C) / Im z``."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    return (f.a * abs(z) ** 2 + f.b * z.real + f.c) / z.imag


def dpar_exact(f: QuadForm, x: Fraction, y2: Fraction) -> Fraction:
    """``Im z * d(X, z)`` for ``z = x + iy`` with rational ``x`` and ``y^2``."""
    return f.a * (x * x + y2) + f.b * x + f.c


def reduce_to_F(z: complex) -> Tuple[complex, Matrix]:
    """Return ``(w, g)`` with ``w = g z`` in the standard fundamental domain."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    if z.imag < 1e-12:
        raise PrecisionError("imaginary part too small to reduce reliably")
    g = IDENTITY
    for _ in range(10000):
        n = math.floor(z.real + 0.5)
        if n:
            z -= n
            g = mat_mul(((1, -n), (0, 1)), g)
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            g = mat_mul(((0, -1), (1, 0)), g)
        else:
            return z, g
    raise PrecisionError("reduction did not terminate")


# --- geodesics -----------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicArc:
    form: QuadForm
    kind: str                       # "semicircle" or "vertical"
    center: Optional[Fraction]
    radius: Optional[float]
    re: Optional[Fraction]
    orientation: int                # +1 counter-clockwise / upward, -1 otherwise
    split: bool
    start: Optional[float]          # l_{-X}; None is the cusp at infinity
    end: Optional[float]            # l_X
    automorph: Optional[Matrix] = None
    base_s: float = 0.123

    def chart(self) -> Matrix:
        """Real Mobius map ``M`` (as floats) with ``M(0) = start``, ``M(oo) = end``."""
        a, b = self.start, self.end
        if b is None:
            return ((1.0, a), (0.0, 1.0))
        if a is None:
            return ((b, -1.0), (1.0, 0.0))
        if b > a:
            return ((b, a), (1.0, 1.0))
        return ((b, -a), (1.0, -1.0))

    def point(self, s: float) -> complex:
        return mobius(self.chart(), 1j * math.exp(s))

    def point_and_velocity(self, s: float) -> Tuple[complex, complex]:
        (a, b), (c, d) = self.chart()
        w = 1j * math.exp(s)
        den = c * w + d
        z = (a * w + b) / den
        dz = (a * d - b * c) / den ** 2 * w
        return z, dz

    def param_of(self, z: complex) -> float:
        """Inverse of :meth:`point` for ``z`` on the arc."""
        (a, b), (c, d) = self.chart()
        w = (d * z - b) / (-c * z + a)
        return math.log(abs(w))

    @property
    def period(self) -> Optional[float]:
        """Length of ``c(X)`` in the ``s`` parameter (``None`` if split)."""
        if self.automorph is None:
            return None
        tr = abs(self.automorph[0][0] + self.automorph[1][1])
        lam = (tr + math.sqrt(tr * tr - 4)) / 2
        return 2 * math.log(lam)

    @property
    def base_point(self) -> complex:
        return self.point(self.base_s)


def endpoints(f: QuadForm) -> Tuple[Optional[float], Optional[float]]:
    """``(l_{-X}, l_X)`` as floats; ``None`` stands for the cusp at infinity."""
    sq = math.sqrt(f.disc)

    def root(sg):
        den = f.b + sg * sq
        if f.a == 0 or sg * f.b >= 0:
            return None if den == 0 else -2 * f.c / den
        return (-f.b + sg * sq) / (2 * f.a)
    return root(-1), root(1)


def endpoints_exact(f: QuadForm) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Rational endpoints of a split form."""
    k = math.isqrt(f.disc)
    def root(sg):
        den = f.b + sg * k
        if den == 0:
            return None
        return Fraction(-2 * f.c, den)
    return root(-1), root(1)


def geodesic(f: QuadForm, N: int = 1, base_s: float = 0.123) -> GeodesicArc:
    D = f.disc
    if D <= 0:
        raise PreconditionError("geodesics need positive discriminant")
    split = is_split_hyperbolic(f, N)
    start, end = endpoints(f)
    if f.a == 0:
        kind, center, radius, re = "vertical", None, None, Fraction(-f.c, f.b)
        orient = 1 if f.b < 0 else -1
    else:
        kind, center, radius, re = "semicircle", Fraction(-f.b, 2 * f.a), math.sqrt(D) / (2 * abs(f.a)), None
        orient = -1 if f.a > 0 else 1
    gam = None
    if not split:
        gam = automorph(f, N)
        # choose the power moving points towards l_X
        (a, b), (c, d) = gam
        if abs(c * end + d) < 1:
            gam = mat_inv(gam)
    return GeodesicArc(f, kind, center, radius, re, orient, split, start, end, gam, base_s)


# --- cusps -----------------------------------------------------------------------

def _sl2_with_column(a: int, c: int) -> Matrix:
    g, x, y = _xgcd(a, c)
    assert g == 1
    return ((a, -y), (c, x))


@dataclass(frozen=True)
class CuspData:
    cusp: Optional[Fraction]        # None for infinity
    sigma: Matrix
    width: int
    beta: Fraction
    h_offsets: Dict[int, Optional[Fraction]]

    @property
    def eps(self) -> Fraction:
        return Fraction(self.width) / self.beta

    @property
    def line(self) -> Tuple[int, int]:
        return (self.sigma[0][0], self.sigma[1][0])


def _cusp_vector(sigma: Matrix, N: int, t: Fraction):
    a, c = sigma[0][0], sigma[1][0]
    # t * sigma u0 sigma^-1 in (A, B, C) coordinates
    return (-t * c * c, 2 * N * a * c * t, -N * a * a * t)


def _in_coset(vec, N: int, h: int) -> bool:
    A, B, C = vec
    if A.denominator != 1 or C.denominator != 1 or B.denominator != 1:
        return False
    return (int(B) - h) % (2 * N) == 0


@lru_cache(maxsize=None)
def cusp_classes(N: int) -> Tuple[CuspData, ...]:
    if N < 1:
        raise ValueError("level must be positive")
    out = []
    for c in sorted(d for d in range(1, N + 1) if N % d == 0):
        m = math.gcd(c, N // c)
        seen = set()
        for a in range(0, N):
            if math.gcd(a, c) != 1 or a % m in seen:
                continue
            seen.add(a % m)
            if c == N:
                sigma, cusp = IDENTITY, None
            else:
                sigma, cusp = _sl2_with_column(a, c), Fraction(a, c)
            width = N // math.gcd(c * c, N)
            den = N * max(c, 1) ** 2
            ts = [Fraction(k, den) for k in range(1, den * den + 1)]
            beta = next(t for t in ts if _in_coset(_cusp_vector(sigma, N, t), N, 0))
            offs = {}
            for h in range(2 * N):
                offs[h] = next((t for t in [Fraction(k, den) for k in range(0, int(beta * den))]
                                if _in_coset(_cusp_vector(sigma, N, t), N, h)), None)
            out.append(CuspData(cusp, sigma, width, beta, offs))
    return tuple(out)


def _as_point(x: Optional[Fraction]) -> Tuple[int, int]:
    if x is None:
        return (1, 0)
    return (x.numerator, x.denominator)


def find_cusp(x: Optional[Fraction], N: int) -> Tuple[int, Matrix]:
    """Index of the cusp class of ``x`` and ``sigma`` with ``sigma oo = x``.

    ``sigma = gamma sigma_l`` for some ``gamma`` in ``Gamma0(N)``.
    """
    p, q = _as_point(x)
    sx = _sl2_with_column(p, q) if q != 0 else IDENTITY
    if q == 0 and p == -1:
        sx = IDENTITY
    for idx, cd in enumerate(cusp_classes(N)):
        for n in range(N):
            s = mat_mul(sx, ((1, n), (0, 1)))
            gam = mat_mul(s, mat_inv(cd.sigma))
            if gam[1][0] % N == 0:
                return idx, s
    raise AssertionError("cusp not found")


def split_real_part(f: QuadForm, N: int = 1) -> Tuple[Fraction, Matrix, int]:
    """``(r_X, sigma, cusp index)`` with ``sigma^-1 c_X = {Re z = r_X}`` running upward."""
    if f.disc <= 0 or not is_split_hyperbolic(f, N):
        raise PreconditionError("form is not split-hyperbolic")
    _, end = endpoints_exact(f)
    idx, sigma = find_cusp(end, N)
    alpha = cusp_classes(N)[idx].width
    F = f.act(sigma)
    assert F.a == 0 and F.b < 0, F
    r = Fraction(-F.c, F.b)
    k = math.floor(r / alpha + Fraction(1, 2))
    if k:
        sigma = mat_mul(sigma, ((1, k * alpha), (0, 1)))
        r -= k * alpha
    return r, sigma, idx


def bernoulli1(x) -> Fraction:
    """Periodic ``B_1(x) = x - (ceil x + floor x)/2``; zero at integers."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return x - Fraction(math.ceil(x) + math.floor(x), 2)
    return x - (math.ceil(x) + math.floor(x)) / 2
