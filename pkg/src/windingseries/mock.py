"""Mock modular machinery: Eichler integrals, the xi and lowering operators,
the indefinite theta function in signature (2, 1), the third order mock
theta functions and the lattice combinatorics of a quaternionic example."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import mpmath
import numpy as np

from .hyperbolic import PrecisionError, bernoulli1, cusp_classes
from .lattice import DiscriminantForm, gamma0_discriminant_form
from .qforms import GenusCharContext, QuadForm, genus_character, mat_inv
from .theta import erfc, sgn


# --- Eichler integral and the differential operators -------------------------------------

@dataclass
class MockPair:
    """Holomorphic part together with its shadow (``k`` is the weight of the completion)."""
    holo: Dict[Fraction, complex]
    shadow: Dict[Fraction, complex]
    k: Fraction


def eichler_integral(g: Mapping, k, tau: complex, tol: float = 1e-14) -> complex:
    """``g*(tau) = -sum conj(b_n) (4 pi n)^(k-1) Gamma(1-k, 4 pi n v) q^-n``.

    ``g`` maps positive exponents ``n`` to coefficients ``b_n`` of a cusp
    form of weight ``2 - k``.  A mapping of mappings is treated as vector
    valued and returns a dict.
    """
    k = Fraction(k)
    if k >= 2 or k.denominator not in (1, 2):
        raise ValueError("only half-integral weights k < 2 are supported")
    if g and isinstance(next(iter(g.values())), Mapping):
        return {h: eichler_integral(comp, k, tau, tol) for h, comp in g.items()}
    tau = complex(tau)
    v = tau.imag
    s = 0j
    for n, b in g.items():
        n = Fraction(n)
        if n <= 0:
            raise ValueError("shadow must be cuspidal")
        if b == 0:
            continue
        x = 4 * math.pi * float(n) * v
        gam = float(mpmath.gammainc(1 - float(k), x))
        term = -complex(b).conjugate() * (4 * math.pi * float(n)) ** (float(k) - 1) * gam
        s += term * cmath.exp(-2j * math.pi * float(n) * tau.real) * math.exp(2 * math.pi * float(n) * v)
    return s


def _dbar(F: Callable[[complex], np.ndarray], tau: complex, step: float) -> np.ndarray:
    """``d/d tau-bar = (d_u + i d_v)/2`` by central differences with one Richardson step."""
    tau = complex(tau)
    if step <= 1e-12 or step >= tau.imag / 2:
        raise PrecisionError("finite-difference step out of range")

    def central(h):
        du = (np.asarray(F(tau + h)) - np.asarray(F(tau - h))) / (2 * h)
        dv = (np.asarray(F(tau + 1j * h)) - np.asarray(F(tau - 1j * h))) / (2 * h)
        return (du + 1j * dv) / 2
    d1, d2 = central(step), central(step / 2)
    return (4 * d2 - d1) / 3


def xi_op(F: Callable[[complex], np.ndarray], k, tau: complex, step: float = 1e-4) -> np.ndarray:
    """``xi_k F = 2 i v^k conj(d F / d tau-bar)``."""
    v = complex(tau).imag
    return 2j * v ** float(k) * np.conj(_dbar(F, tau, step))


def lowering_op(F: Callable[[complex], np.ndarray], tau: complex, step: float = 1e-4) -> np.ndarray:
    """``L = -2 i v^2 d/d tau-bar``."""
    v = complex(tau).imag
    return -2j * v * v * _dbar(F, tau, step)


# --- the indefinite theta function --------------------------------------------------------

@dataclass(frozen=True)
class Sig21Lattice:
    """The level ``N`` lattice ``{(A, B, C): 2N | B}`` with ``Q = B^2/4N - AC``."""
    N: int = 1

    @property
    def gram(self) -> np.ndarray:
        N = self.N
        return np.array([[0, 0, -1], [0, 2 * N, 0], [-1, 0, 0]])

    @property
    def signature(self) -> Tuple[int, int]:
        ev = np.linalg.eigvalsh(self.gram.astype(float))
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    @property
    def dform(self) -> DiscriminantForm:
        return gamma0_discriminant_form(self.N)


@dataclass(frozen=True)
class Point:
    """The negative line through ``X(z)``, taken in the cone opposite to ``X(z)``."""
    z: complex


@dataclass(frozen=True)
class Cusp:
    """The isotropic line of a cusp class, on the same cone as :class:`Point`."""
    idx: int


Direction = Union[Point, Cusp]


def _exact_point(z: complex) -> Tuple[Fraction, Fraction]:
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def _d_sign(f: QuadForm, x: Fraction, y: Fraction) -> int:
    """Exact sign of ``d(X, z)`` at the binary value of ``z``."""
    return sgn(f.a * (x * x + y * y) + f.b * x + f.c)


def _moebius_exact(g, x: Fraction, y: Fraction) -> Tuple[Fraction, Fraction]:
    (p, q), (r, s) = g
    den = (r * x + s) ** 2 + (r * y) ** 2
    re = ((p * x + q) * (r * x + s) + p * r * y * y) / den
    return re, y / den


def pairing_sign(f: QuadForm, c: Direction, N: int) -> int:
    """``sgn((X, c))`` for the form ``f`` (``sgn(0) = 0``)."""
    if isinstance(c, Point):
        return -_d_sign(f, *_exact_point(c.z))
    sig = cusp_classes(N)[c.idx].sigma
    return -sgn(f.act(sig).a)


def _hol_point_point(N: int, h: int, D: int, c1: Point, c2: Point) -> Fraction:
    z1, z2 = complex(c1.z), complex(c2.z)
    k = math.sqrt(D)
    ymin = min(z1.imag, z2.imag)
    xmin, xmax = min(z1.real, z2.real), max(z1.real, z2.real)
    tot = Fraction(0)
    amax = int(k / (2 * ymin)) + 1
    for a in range(-amax, amax + 1):
        if a % N:
            continue
        if a == 0:
            kk = math.isqrt(D)
            if kk * kk != D or kk == 0:
                continue
            for b in {kk, -kk}:
                if (b - h) % (2 * N):
                    continue
                # line x = -c/b inside [xmin, xmax]
                lo, hi = sorted((-b * xmin, -b * xmax))
                for c in range(math.floor(lo) - 1, math.ceil(hi) + 2):
                    f = QuadForm(0, b, c)
                    tot += Fraction(pairing_sign(f, c1, N) - pairing_sign(f, c2, N), 2)
            continue
        r = k / (2 * abs(a))
        lo, hi = sorted((-2 * a * (xmin - r), -2 * a * (xmax + r)))
        for b in range(math.floor(lo) - 1, math.ceil(hi) + 2):
            if (b - h) % (2 * N) or (b * b - D) % (4 * a):
                continue
            f = QuadForm(a, b, (b * b - D) // (4 * a))
            tot += Fraction(pairing_sign(f, c1, N) - pairing_sign(f, c2, N), 2)
    return tot


def _hol_point_cusp(N: int, D: int, c1: Point, c2: Cusp, weight: Callable[[QuadForm], int],
                    period: int) -> Fraction:
    """Coefficient for a point and a cusp, each ``X`` counted with ``weight(X)``.

    The family orthogonal to the cusp is summed with the regularization
    ``sum_n sgn(x + n)/2 = -B1(x)``; ``weight`` must be periodic in ``c'`` with
    the given period along that family.
    """
    sig = cusp_classes(N)[c2.idx].sigma
    sinv = mat_inv(sig)
    # z' = sigma^-1 z, exactly
    xe, ye = _moebius_exact(sinv, *_exact_point(c1.z))
    x, y = float(xe), float(ye)
    k = math.sqrt(D)
    tot = Fraction(0)
    amax = int(k / (2 * y)) + 1
    for a in range(-amax, amax + 1):
        if a == 0:
            continue
        lo, hi = -2 * a * x - k, -2 * a * x + k
        for b in range(math.floor(lo), math.ceil(hi) + 1):
            if (b * b - D) % (4 * a):
                continue
            Y = QuadForm(a, b, (b * b - D) // (4 * a))
            X = Y.act(sinv)
            if X.a % N:
                continue
            w = weight(X)
            if w:
                tot += w * Fraction(-_d_sign(Y, xe, ye) + sgn(a), 2)
    if D == 0:
        # isotropic X parallel to the cusp: carried by the cusp convention
        return tot
    kk = math.isqrt(D)
    if kk * kk == D:
        for b in {kk, -kk}:
            for res in range(period):
                X = QuadForm(0, b, res).act(sinv)
                if X.a % N:
                    continue
                w = weight(X)
                if w:
                    # c' = res + period n; sgn(d) = sgn(xt + n)
                    tot += w * bernoulli1((b * xe + res) / period)
    return tot


def zwegers_hol_coeff(lat: Sig21Lattice, c1: Direction, c2: Direction, h: int, m: Fraction) -> Fraction:
    """``sum_{X in L_{m,h}} (sgn(X, c1) - sgn(X, c2))/2`` for ``m >= 0``."""
    N = lat.N
    m = Fraction(m)
    D = m * 4 * N
    if m < 0 or D.denominator != 1:
        return Fraction(0)
    D = int(D)
    if (D - h * h) % (4 * N):
        return Fraction(0)
    if c1 == c2:
        return Fraction(0)
    if isinstance(c1, Point) and isinstance(c2, Point):
        return _hol_point_point(N, h, D, c1, c2)
    def weight(X):
        return 1 if (X.b - h) % (2 * N) == 0 else 0
    if isinstance(c1, Point) and isinstance(c2, Cusp):
        return _hol_point_cusp(N, D, c1, c2, weight, 2 * N)
    if isinstance(c1, Cusp) and isinstance(c2, Point):
        return -_hol_point_cusp(N, D, c2, c1, weight, 2 * N)
    raise NotImplementedError("two cusps are not supported")


def twisted_hol_coeff(Delta: int, r: int, N: int, c1: Point, c2: Cusp, d: int) -> Fraction:
    """``sum_{X in Q_{N, -Delta d}} chi_Delta(X) (sgn(X, c1) - sgn(X, c2))/2``."""
    ctx = GenusCharContext(Delta, r, N)
    D = -Delta * d
    if D < 0:
        return Fraction(0)
    return _hol_point_cusp(N, D, c1, c2, lambda X: genus_character(ctx, X), 2 * N * abs(Delta))


def _point_theta(N: int, h: int, z: complex, tau: complex, tol: float) -> complex:
    """``sum_{X in L + h} psi~^0(sqrt(v) X, z) e(Q(X) tau)``.

    Majorant: with ``Y = X|g``, ``g = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]``,
    ``Y = [a y, 2ax + b, (ax^2 + bx + c)/y]`` and the summand is bounded by
    ``exp(-2 pi v (b'^2 + 2a'^2 + 2c'^2)/4N)``.
    """
    tau = complex(tau)
    v = tau.imag
    z = complex(z)
    x, y = z.real, z.imag
    xe, ye = _exact_point(z)
    K = (math.log(1 / tol) + 10) * 4 * N / (2 * math.pi * v)
    amax = int(math.sqrt(K / 2) / y) + 1
    tot = 0j
    for a in range(-amax, amax + 1):
        if a % N:
            continue
        ap = a * y
        rem = K - 2 * ap * ap
        if rem < 0:
            continue
        bw = math.sqrt(rem)
        for b in range(math.floor(-2 * a * x - bw), math.ceil(-2 * a * x + bw) + 1):
            if (b - h) % (2 * N):
                continue
            bp = 2 * a * x + b
            rem2 = rem - bp * bp
            if rem2 < 0:
                continue
            cw = math.sqrt(rem2 / 2) * y
            c0 = -(a * x * x + b * x)
            for c in range(math.floor(c0 - cw), math.ceil(c0 + cw) + 1):
                if a == 0 and b == 0 and c == 0:
                    continue
                f = QuadForm(a, b, c)
                sd = _d_sign(f, xe, ye)
                if sd == 0:
                    continue
                # the sign must agree with the exact one used by the holomorphic part
                ps = -sd / 2 * erfc(math.sqrt(math.pi * v / N) * abs(f.a * (x * x + y * y) + f.b * x + f.c) / y)
                if ps:
                    tot += ps * cmath.exp(2j * math.pi * tau * f.disc / (4 * N))
    return tot


def _cusp_theta(N: int, h: int, c: Cusp) -> Fraction:
    off = cusp_classes(N)[c.idx].h_offsets.get(h)
    if off is None:
        return Fraction(0)
    return -bernoulli1(off / cusp_classes(N)[c.idx].beta)


def _nonhol(N: int, h: int, c: Direction, tau: complex, tol: float) -> complex:
    if isinstance(c, Point):
        return _point_theta(N, h, c.z, tau, tol)
    return complex(_cusp_theta(N, h, c))


def zwegers_theta(lat: Sig21Lattice, c1: Direction, c2: Direction, h: int, tau: complex,
                  tol: float = 1e-12) -> complex:
    """Component ``h`` of the indefinite theta function attached to ``c1, c2``."""
    if lat.signature != (2, 1):
        raise ValueError("lattice must have signature (2, 1)")
    if c1 == c2:
        return 0j
    N = lat.N
    tau = complex(tau)
    v = tau.imag
    hol = 0j
    mmax = (math.log(1 / tol) + 10) / (2 * math.pi * v)
    D = 0
    while D <= 4 * N * mmax:
        c = zwegers_hol_coeff(lat, c1, c2, h, Fraction(D, 4 * N))
        if c:
            hol += float(c) * cmath.exp(2j * math.pi * tau * D / (4 * N))
        D += 1
    return hol + _nonhol(N, h, c2, tau, tol) - _nonhol(N, h, c1, tau, tol)


def zwegers_vector(lat: Sig21Lattice, c1: Direction, c2: Direction, tau: complex, tol: float = 1e-12) -> np.ndarray:
    return np.array([zwegers_theta(lat, c1, c2, h, tau, tol) for h in range(2 * lat.N)])


# --- mock theta functions -----------------------------------------------------------------

def _series_inv_sq(poly: List[int], n: int) -> List[int]:
    """Power series of ``1/poly^2`` to ``n`` terms (``poly[0] = 1``)."""
    sq = [0] * n
    for i, a in enumerate(poly[:n]):
        if a:
            for j, b in enumerate(poly[:n - i]):
                sq[i + j] += a * b
    out = [0] * n
    out[0] = 1
    for k in range(1, n):
        out[k] = -sum(sq[i] * out[k - i] for i in range(1, k + 1) if i < len(sq))
    return out


def _mul(a: List[int], b: List[int], n: int) -> List[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return out


def _mock(n_terms: int, expo: Callable[[int], int], factor: Callable[[int], List[int]], off: int,
          route: str) -> List[int]:
    """``sum_n q^expo(n) / prod_{k <= n + off} factor(k)^2`` to ``n_terms`` coefficients."""
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    one = [1] + [0] * (n_terms - 1)
    nmax = 0
    while expo(nmax + 1) < n_terms:
        nmax += 1
    if route == "direct":
        out = [0] * n_terms
        prod = one
        for k in range(1, off + 1):
            prod = _mul(prod, factor(k), n_terms)
        for n in range(nmax + 1):
            if n:
                prod = _mul(prod, factor(n + off), n_terms)
            e0 = expo(n)
            for i, c in enumerate(_series_inv_sq(prod, n_terms - e0)):
                out[e0 + i] += c
        return out
    if route == "nested":
        # 1 + q^(e1-e0)/p^2 (1 + q^(e2-e1)/p^2 (1 + ...)), evaluated from the inside
        acc = one
        for n in range(nmax, 0, -1):
            de = expo(n) - expo(n - 1)
            inner = _mul(acc, _series_inv_sq(factor(n + off), n_terms), n_terms)
            acc = list(one)
            for i in range(n_terms - de):
                acc[i + de] += inner[i]
        for k in range(off, 0, -1):
            acc = _mul(acc, _series_inv_sq(factor(k), n_terms), n_terms)
        shift = expo(0)
        return [0] * shift + acc[:n_terms - shift]
    raise ValueError("route must be 'direct' or 'nested'")


def mock_theta_f(n_terms: int, route: str = "direct") -> List[int]:
    """``f(q) = sum q^(n^2) / prod_{k<=n} (1 + q^k)^2``."""
    def factor(k):
        p = [0] * (k + 1)
        p[0], p[k] = 1, 1
        return p
    return _mock(n_terms, lambda n: n * n, factor, 0, route)


def mock_theta_omega(n_terms: int, route: str = "direct") -> List[int]:
    """``omega(q) = sum q^(2n^2+2n) / prod_{k<=n+1} (1 - q^(2k-1))^2``."""
    def factor(k):
        p = [0] * (2 * k)
        p[0], p[2 * k - 1] = 1, -1
        return p
    return _mock(n_terms, lambda n: 2 * n * n + 2 * n, factor, 1, route)


# --- the quaternionic lattice -----------------------------------------------------------

DEN = 24


@dataclass
class GradedSeries:
    """``sum c_j q^(j/24)`` with exact coefficients, known for ``j < prec``."""
    coeffs: Dict[int, Fraction]
    prec: int

    def __add__(self, other):
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out.get(j, 0) + c
        return GradedSeries({j: c for j, c in out.items() if c}, min(self.prec, other.prec))

    def scale(self, s):
        return GradedSeries({j: s * c for j, c in self.coeffs.items() if s * c}, self.prec)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        lo_a = min(self.coeffs, default=0)
        lo_b = min(other.coeffs, default=0)
        prec = min(self.prec + lo_b, other.prec + lo_a)
        out: Dict[int, Fraction] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                if i + j < prec:
                    out[i + j] = out.get(i + j, 0) + a * b
        return GradedSeries({j: c for j, c in out.items() if c}, prec)

    @property
    def min_exponent(self) -> Optional[Fraction]:
        return Fraction(min(self.coeffs), DEN) if self.coeffs else None

    def to_json(self) -> dict:
        return {"denominator": DEN,
                "coeffs": [{"num": j, "value": str(c)} for j, c in sorted(self.coeffs.items())]}


def _from_integer_series(coeffs: List[int], shift: int, scale: int, stride: int, sign_alt: bool = False,
                         mult: int = 1, prec: int = 0) -> GradedSeries:
    """``mult * q^(shift/24) * sum c_n (+-1)^n q^(n * stride/24)``."""
    out = {}
    for n, c in enumerate(coeffs):
        j = shift + n * stride
        if j >= prec:
            break
        if c:
            out[j] = Fraction(mult * c * ((-1) ** n if sign_alt else 1))
    return GradedSeries(out, prec)


def _qmod(x: Fraction) -> Fraction:
    return x - math.floor(x)


def shimura_block(n_terms: int = 48) -> dict:
    """Assemble the mock theta vector against the unary theta functions.

    Components are indexed by ``L'/L = (1/2)Z/Z x (1/6)Z/Z x (1/6)Z/Z``
    (coordinates along ``alpha_0, alpha_1, alpha_2``).  Exponents live on the
    grid ``(1/24)Z``; ``n_terms`` is the precision in units of ``1/24``.
    """
    if n_terms < DEN:
        raise ValueError("n_terms must be at least 24")
    prec = n_terms
    nf = prec // DEN + 2
    f = mock_theta_f(nf)
    w = mock_theta_omega(prec // 12 + 2)
    f0 = _from_integer_series(f, -1, 1, DEN, prec=prec)
    # omega(q^(1/2)) has exponents n/2 = 12n/24
    f1 = _from_integer_series(w, 8, 1, 12, mult=2, prec=prec)
    f2 = _from_integer_series(w, 8, 1, 12, sign_alt=True, mult=2, prec=prec)
    zero = GradedSeries({}, prec)
    vec = [zero, f0, f2 - f1, zero, (f1 + f2).scale(-1), f0.scale(-1), zero, f0, f1 + f2, zero, f1 - f2,
           f0.scale(-1)]
    vec = [s.scale(Fraction(-1, 4)) for s in vec]

    # N = Z lambda0, Q(lambda0) = -6, N'/N = (1/12)Z/Z
    def theta_unary(q_of_unit: int, mu: Fraction) -> GradedSeries:
        out: Dict[int, Fraction] = {}
        # Q((n + mu) lambda) = q_of_unit (n + mu)^2
        bound = math.isqrt(prec) + 2
        for n in range(-bound, bound + 1):
            t = n + mu
            ex = q_of_unit * t * t * DEN
            assert ex.denominator == 1
            if ex < prec:
                out[int(ex)] = out.get(int(ex), 0) + 1
        return GradedSeries(out, prec)

    theta_P = {Fraction(k, 4): theta_unary(2, Fraction(k, 4)) for k in range(4)}
    theta_L2 = {Fraction(k, 6): theta_unary(3, Fraction(k, 6)) for k in range(6)}

    # L'/L~ and phi
    mus = []
    for k0 in range(12):
        for k1 in range(4):
            for k2 in range(6):
                m0, m1, m2 = Fraction(k0, 12), Fraction(k1, 4), Fraction(k2, 6)
                if (3 * m0 + m1) * 2 % 1 == 0 and (m0 + m1) * 6 % 1 == 0:
                    mus.append((m0, m1, m2))

    def phi(mu):
        m0, m1, m2 = mu
        return (_qmod(3 * m0 + m1), _qmod(m0 + m1), m2)
    fibers: Dict[tuple, list] = {}
    for mu in mus:
        fibers.setdefault(phi(mu), []).append(mu)
    hs = [(Fraction(a, 2), Fraction(b, 6), Fraction(c, 6)) for a in range(2) for b in range(6) for c in range(6)]
    comps = {}
    for hh in hs:
        tot = GradedSeries({}, prec)
        for (m0, m1, m2) in fibers.get(hh, []):
            tot = tot + vec[int(m0 * 12)] * theta_P[m1] * theta_L2[m2]
        comps[hh] = tot

    # vartheta_N: coefficient (lambda, lambda0)/sqrt6 = -2 sqrt6 (n + k/12), stored without
    # the sqrt6, keyed by 24 Q(lambda) <= 0 and truncated at |24 Q| < prec
    vartheta_N = {}
    bound = math.isqrt(prec) + 2
    for k in range(12):
        out: Dict[int, Fraction] = {}
        for n in range(-bound, bound + 1):
            t = n + Fraction(k, 12)
            ex = -6 * t * t * DEN
            if -ex < prec:
                out[int(ex)] = out.get(int(ex), 0) - 2 * t
        vartheta_N[k] = {j: c for j, c in out.items() if c}
    mins = {hh: s.min_exponent for hh, s in comps.items()}
    return {"f0": f0, "f1": f1, "f2": f2, "vector": vec, "theta_P": theta_P, "theta_L2": theta_L2,
            "mus": mus, "fibers": fibers, "components": comps, "min_exponents": mins,
            "vartheta_N": vartheta_N, "sigma": lambda k: (5 * k) % 12}
