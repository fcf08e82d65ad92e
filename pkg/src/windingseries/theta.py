"""Theta objects: the unary series at a cusp, the Siegel theta function, the
completion and its lowering, the singular function and the periodic G."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import erfc as _erfc

from .hyperbolic import PrecisionError, bernoulli1, cusp_classes, dpar, split_real_part
from .modfun import ThirdKindForm
from .qforms import (GenusCharContext, Matrix, QuadForm, _xgcd, gamma0_equivalent, genus_character, lift_column,
                     mat_inv, p1_normalize, p1_points)

SQRT_PI = math.sqrt(math.pi)


def erfc(t: float) -> float:
    return float(_erfc(t))


B1 = bernoulli1


def sgn(x) -> int:
    return (x > 0) - (x < 0)


# --- g and G -----------------------------------------------------------------------

def g_fun(w: float, kappa: float, s) -> float:
    """``g(w; kappa, s)`` at the two closed-form values ``s = 0`` and ``s = 1/2``."""
    if w == 0:
        raise ValueError("g is singular at w = 0")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if s == 0:
        return sgn(w) / 2 * erfc(math.sqrt(math.pi * kappa) * abs(w))
    if s == Fraction(1, 2) or s == 0.5:
        return math.exp(-math.pi * w * w * kappa) / (2 * math.pi * w)
    raise NotImplementedError("only s = 0 and s = 1/2 have closed forms here")


def periodic_G(x: float, kappa: float, side: str = "direct", tol: float = 1e-16) -> float:
    """``G(x; kappa, 0) = sum_n g(x + n; kappa, 0)`` or its Fourier expansion."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if side == "direct":
        if abs(x - round(x)) < 1e-300:
            raise ValueError("x must not be an integer")
        # erfc(t) < exp(-t^2) for t > 0: stop once sqrt(pi kappa)|x+n| > T
        T = math.sqrt(math.log(1 / tol) + 5)
        nmax = int(math.ceil(T / math.sqrt(math.pi * kappa) + abs(x))) + 1
        if nmax > 10 ** 7:
            raise PrecisionError("kappa too small for the direct side")
        n = np.arange(-nmax, nmax + 1)
        w = x + n
        return float(np.sum(np.sign(w) / 2 * _erfc(math.sqrt(math.pi * kappa) * np.abs(w))))
    if side == "fourier":
        T = math.log(1 / tol) + 5
        mmax = int(math.ceil(math.sqrt(T * kappa / math.pi))) + 1
        if mmax > 10 ** 7:
            raise PrecisionError("kappa too large for the Fourier side")
        m = np.arange(1, mmax + 1)
        corr = np.sum(np.exp(-math.pi * m * m / kappa) * np.sin(2 * math.pi * m * x) / (math.pi * m))
        return float(-B1(x) - corr)
    raise ValueError("side must be 'direct' or 'fourier'")


# --- coefficient functions ----------------------------------------------------------

@dataclass
class CoeffFn:
    """A sum of terms in ``v``: constants, ``mult * sign * erfc(a sqrt v)/2`` and
    ``amp * v^(3/2) exp(-b v)``."""
    const: complex = 0j
    erfc_terms: Dict[Tuple[int, float], int] = field(default_factory=dict)
    gauss_terms: Dict[float, float] = field(default_factory=dict)

    def add_erfc(self, sign: int, scale: float, mult: int = 1):
        if sign == 0 or mult == 0:
            return
        key = (sign, scale)
        self.erfc_terms[key] = self.erfc_terms.get(key, 0) + mult

    def add_gauss(self, amp: float, scale: float):
        self.gauss_terms[scale] = self.gauss_terms.get(scale, 0.0) + amp

    def prune(self) -> "CoeffFn":
        """Drop terms whose multiplicities cancelled."""
        self.erfc_terms = {k: m for k, m in self.erfc_terms.items() if m}
        self.gauss_terms = {b: a for b, a in self.gauss_terms.items() if a}
        return self

    def __call__(self, v: float) -> complex:
        out = complex(self.const)
        for (s, a), k in self.erfc_terms.items():
            out += k * s * erfc(a * math.sqrt(v)) / 2
        for b, amp in self.gauss_terms.items():
            out += amp * v ** 1.5 * math.exp(-b * v)
        return out

    def derivative(self, v: float) -> complex:
        """Exact ``d/dv``."""
        out = 0j
        for (s, a), k in self.erfc_terms.items():
            out += -k * s * a * math.exp(-a * a * v) / (2 * math.sqrt(math.pi * v))
        for b, amp in self.gauss_terms.items():
            out += amp * (1.5 * math.sqrt(v) - b * v ** 1.5) * math.exp(-b * v)
        return out

    def lower(self) -> "CoeffFn":
        """Coefficient of ``L_tau (c(v) e(d tau)) = v^2 c'(v) e(d tau)`` for erfc-only ``c``."""
        if self.gauss_terms:
            raise NotImplementedError("lowering is only closed on erfc terms")
        out = CoeffFn()
        for (s, a), k in self.erfc_terms.items():
            out.add_gauss(-k * s * a / (2 * SQRT_PI), a * a)
        return out

    def to_json(self) -> list:
        out = []
        if self.const:
            out.append({"type": "const", "re": complex(self.const).real, "im": complex(self.const).imag})
        for (s, a), k in sorted(self.erfc_terms.items(), key=lambda t: (t[0][1], t[0][0])):
            out.append({"type": "erfc", "sign": s, "scale": a, "mult": k})
        for b, amp in sorted(self.gauss_terms.items()):
            out.append({"type": "gauss", "amp": amp, "scale": b})
        return out


# --- the singular function ----------------------------------------------------------

def psi_tilde0(f: QuadForm, z: complex, v: float = 1.0, N: int = 1) -> float:
    """``psi~^0(sqrt(v) X, z) = -sgn(d)/2 erfc(sqrt(pi v/N) |d(X, z)|)``; zero on ``c_X``."""
    d = dpar(f, z)
    if d == 0:
        return 0.0
    return -sgn(d) / 2 * erfc(math.sqrt(math.pi * v / N) * abs(d))


# --- points above i ------------------------------------------------------------------

def elliptic_points(N: int) -> List[Tuple[Matrix, int]]:
    """Points of ``Gamma0(N)\\H`` above ``[i]`` as ``(g, weight)`` with ``zeta = g i``.

    ``weight`` is 1 at elliptic points of order 2 and 2 otherwise: the
    residue of ``dlog(j - 1728)`` there, in the orbifold coordinate.
    """
    seen = set()
    out = []
    # Gamma0(N) g <-> bottom row (c : d); right multiplication by S sends it to (d : -c)
    for (c, d) in p1_points(N):
        if (c, d) in seen:
            continue
        orb = {(c, d), p1_normalize((d, -c), N)}
        seen |= orb
        out.append((_sl2_with_bottom_row(c, d, N), 2 if len(orb) == 2 else 1))
    return out


def _sl2_with_bottom_row(c: int, d: int, N: int) -> Matrix:
    if N == 1:
        return ((1, 0), (0, 1))
    g = lift_column((d, -c), N)
    dd, cc = g[0][0], -g[1][0]
    _, x, y = _xgcd(dd, cc)               # dd x + cc y = 1
    return ((x, -y), (cc, dd))


# --- Siegel theta -------------------------------------------------------------------

def _genus_ctx(Delta, r, N):
    return GenusCharContext(Delta, r, N)


def siegel_theta_Delta(Delta: int, tau: complex, cutoff: Optional[int] = None, r: Optional[int] = None,
                       tol: float = 1e-14) -> complex:
    """The displayed triple sum over ``A, B, C`` (level one)."""
    tau = complex(tau)
    v = tau.imag
    a = abs(Delta)
    if r is None:
        r = _default_r(Delta, 1)
    ctx = _genus_ctx(Delta, r, 1)
    if cutoff is None:
        # exponent (2 pi v/|Delta|)(B^2 + 2A^2 + 2C^2)
        K = math.log(1 / tol) + 10
        cutoff = int(math.ceil(math.sqrt(K * a / (2 * math.pi * v)))) + 1
    total = 0j
    for A in range(-cutoff, cutoff + 1):
        for C in range(-cutoff, cutoff + 1):
            if A + C == 0:
                continue
            for B in range(-2 * cutoff, 2 * cutoff + 1):
                f = QuadForm(A, B, C)
                chi = genus_character(ctx, f)
                if not chi:
                    continue
                D = B * B - 4 * A * C
                e = cmath.exp(2j * math.pi * tau * (-D / a)) * math.exp(-4 * math.pi * v * (B * B + (A - C) ** 2) / a)
                total += chi * (A + C) * e
    return total / math.sqrt(a)


def _default_r(Delta: int, N: int) -> int:
    for r in range(2 * N):
        if (Delta - r * r) % (4 * N) == 0:
            return r
    raise ValueError("Delta is not a square mod 4N")


# --- completion and shadow tables ---------------------------------------------------

@dataclass
class ThetaTable:
    Delta: int
    N: int
    coeffs: Dict[int, CoeffFn]
    v_min: float
    tol: float
    s_max: float

    def __call__(self, tau: complex) -> complex:
        tau = complex(tau)
        v = tau.imag
        if v < self.v_min:
            raise PrecisionError("table built for v >= %g" % self.v_min)
        return sum(c(v) * cmath.exp(2j * math.pi * d * tau) for d, c in self.coeffs.items())

    def to_json(self) -> dict:
        return {"Delta": self.Delta, "N": self.N,
                "coeffs": [{"d": d, "terms": c.to_json()} for d, c in sorted(self.coeffs.items())]}


def _forms_near(zeta_g: Matrix, N: int, D: int, smax: float) -> Iterable[Tuple[QuadForm, int]]:
    """Forms ``X`` in ``Q_{N,D}`` with ``|d(X, zeta)| <= smax`` where ``zeta = g i``.

    Yields ``(X, d(X, zeta))``; ``d(X, g i) = d(X|g, i) = a + c`` for ``Y = X|g``.
    """
    ginv = mat_inv(zeta_g)
    S = int(math.floor(smax))
    for s in range(-S, S + 1):
        # Y = [a, b, s - a]; D = b^2 - 4a(s - a) = b^2 + (2a - s)^2 - s^2
        bound = s * s + D
        if bound < 0:
            continue
        bmax = math.isqrt(bound)
        for b in range(-bmax, bmax + 1):
            rest = bound - b * b
            t = math.isqrt(rest)
            if t * t != rest:
                continue
            for tt in ({t, -t}):
                if (tt + s) % 2:
                    continue
                a = (tt + s) // 2
                Y = QuadForm(a, b, s - a)
                X = Y.act(ginv)
                if X.a % N == 0:
                    yield X, s


def theta_star(Delta: int, r: int, N: int, eta: ThirdKindForm, d_max: int, v_min: float = 0.4,
               tol: float = 1e-13, d_min: Optional[int] = None) -> Tuple[ThetaTable, Fraction]:
    """Coefficient table of the completion plus its constant term.

    All ``X`` with ``chi(X) != 0`` enter, including ``d <= 0`` (definite and
    isotropic forms); these are needed for the identity with ``v^(3/2) conj(theta)``.
    """
    a = abs(Delta)
    ctx = _genus_ctx(Delta, r, N)
    K = math.log(1 / tol) + 10
    smax = math.sqrt(K * a / (4 * math.pi * v_min)) + 1
    if d_min is None:
        d_min = -int(math.ceil(smax * smax / a))
    scale = math.sqrt(4 * math.pi / a)
    coeffs: Dict[int, CoeffFn] = {}
    for g, w in elliptic_points(N):
        rz = eta.sign * w
        for d in range(d_min, d_max + 1):
            if (-d * Delta) % 4 not in (0, 1):
                continue
            D = -d * Delta
            cf = coeffs.setdefault(d, CoeffFn())
            for X, s in _forms_near(g, N, D, smax):
                chi = genus_character(ctx, X)
                if chi and s:
                    # r_zeta chi sgn(d)/2 erfc(sqrt(4 pi v/|Delta|) |d|)
                    cf.add_erfc(sgn(s) * chi * sgn(rz), scale * abs(s), abs(rz))
    coeffs = {d: c for d, c in coeffs.items() if c.prune().erfc_terms}
    const = theta_star_constant(Delta, r, N, eta)
    coeffs.setdefault(0, CoeffFn()).const += complex(const)
    return ThetaTable(Delta, N, coeffs, v_min, tol, smax), const


def theta_lower(Delta: int, r: int, N: int, eta: ThirdKindForm, d_max: int, v_min: float = 0.4,
                tol: float = 1e-13, d_min: Optional[int] = None) -> ThetaTable:
    """Shadow-side table built from the displayed Gaussian sum (not by lowering)."""
    a = abs(Delta)
    ctx = _genus_ctx(Delta, r, N)
    K = math.log(1 / tol) + 10
    smax = math.sqrt(K * a / (4 * math.pi * v_min)) + 1
    if d_min is None:
        d_min = -int(math.ceil(smax * smax / a))
    coeffs: Dict[int, CoeffFn] = {}
    for g, w in elliptic_points(N):
        rz = eta.sign * w
        for d in range(d_min, d_max + 1):
            if (-d * Delta) % 4 not in (0, 1):
                continue
            cf = coeffs.setdefault(d, CoeffFn())
            for X, s in _forms_near(g, N, -d * Delta, smax):
                chi = genus_character(ctx, X)
                if chi and s:
                    # -sqrt(v^3/|Delta|) r chi d exp(-4 pi v d^2/|Delta|)
                    cf.add_gauss(-rz * chi * s / math.sqrt(a), 4 * math.pi * s * s / a)
    coeffs = {d: c for d, c in coeffs.items() if c.prune().gauss_terms}
    return ThetaTable(Delta, N, coeffs, v_min, tol, smax)


def lower_table(table: ThetaTable) -> ThetaTable:
    out = {}
    for d, c in table.coeffs.items():
        c2 = CoeffFn(erfc_terms=dict(c.erfc_terms))
        if c2.erfc_terms:
            out[d] = c2.lower()
    return ThetaTable(table.Delta, table.N, out, table.v_min, table.tol, table.s_max)


def cusp_constant_terms(Delta: int, r: int, N: int) -> Dict[int, Fraction]:
    """``sum_delta chi(delta) B1(delta_l / (|Delta| beta_l))`` for each cusp class."""
    a = abs(Delta)
    ctx = _genus_ctx(Delta, r, N)
    out = {}
    for idx, cd in enumerate(cusp_classes(N)):
        p, c = cd.sigma[0][0], cd.sigma[1][0]
        # t u_l = (-t c^2, 2 N p c t, -N p^2 t); t0 is the step inside L'
        t0 = _min_integral_t(p, c, N)
        period = a * cd.beta
        n = period / t0
        assert n.denominator == 1
        total = Fraction(0)
        for k in range(int(n)):
            t = k * t0
            A, B, C = (-t * c * c, 2 * N * p * c * t, -N * p * p * t)
            chi = genus_character(ctx, QuadForm(N * int(A), int(B), int(C)))
            if chi:
                total += chi * B1(t / period)
        out[idx] = total
    return out


def _min_integral_t(p: int, c: int, N: int) -> Fraction:
    den = N * max(abs(c), 1) ** 2 * 2
    for k in range(1, den + 1):
        t = Fraction(k, den)
        if all(x.denominator == 1 for x in (-t * c * c, 2 * N * p * c * t, -N * p * p * t)):
            return t
    raise AssertionError("no integral multiple found")


def theta_star_constant(Delta: int, r: int, N: int, eta: ThirdKindForm) -> Fraction:
    terms = cusp_constant_terms(Delta, r, N)
    et = ThirdKindForm(eta.sign, N)
    return sum((et.residue_at_cusp(idx) * v for idx, v in terms.items()), Fraction(0))


# --- unary theta at a cusp ---------------------------------------------------------------

def _cusp_frame(cd, N: int, b: Fraction, y: Fraction):
    """Coordinates ``(A, B, C)`` of ``sigma [[-b, y], [0, b]] sigma^-1``."""
    (p, q), (c, d) = cd.sigma
    # sigma Y sigma^-1 with sigma^-1 = [[d, -q], [-c, p]]
    Y = ((-b, y), (Fraction(0), b))
    S = ((p, q), (c, d))
    Si = ((d, -q), (-c, p))
    M = [[sum(S[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    X = [[sum(M[i][k] * Si[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    A = X[1][0]
    B = 2 * N * X[1][1]
    C = -N * X[0][1]
    return A, B, C


def unary_theta_coeffs(cusp_idx: int, N: int, k_max: int) -> Dict[Tuple[int, int], float]:
    """Coefficients ``b_l(m, h)`` keyed by ``(k, h)`` with ``m = k^2/4N`` (direct lattice route)."""
    cd = cusp_classes(N)[cusp_idx]
    beta = cd.beta
    jmax = int(2 * N * beta)
    assert Fraction(jmax) == 2 * N * beta
    out: Dict[Tuple[int, int], float] = {}
    for k in range(-k_max, k_max + 1):
        if k == 0:
            continue
        b = Fraction(k, 2 * N)
        for j in range(jmax):
            y = Fraction(j, 2 * N)
            A, B, C = _cusp_frame(cd, N, b, y)
            if A.denominator != 1 or B.denominator != 1 or C.denominator != 1:
                continue
            h = int(B) % (2 * N)
            key = (abs(k), h)
            out[key] = out.get(key, 0.0) + math.sqrt(N) * float(b)
    return {key: v for key, v in out.items() if v != 0}


def unary_theta_lemma(cusp_idx: int, N: int, k_max: int) -> Dict[Tuple[int, int], Fraction]:
    """Same coefficients via ``-(sqrt N/(2 eps)) sum delta_l(X)`` over ``Gamma_l``-orbits.

    Returned divided by ``sqrt N`` (exact rationals).
    """
    cd = cusp_classes(N)[cusp_idx]
    alpha = cd.width
    out: Dict[Tuple[int, int], Fraction] = {}
    for k in range(-k_max, k_max + 1):
        if k == 0:
            continue
        b = Fraction(k, 2 * N)
        # Gamma_l moves y by 2 b alpha
        per = abs(2 * b * alpha)
        jmax = per * 2 * N
        assert jmax.denominator == 1
        for j in range(int(jmax)):
            y = Fraction(j, 2 * N)
            A, B, C = _cusp_frame(cd, N, b, y)
            if A.denominator != 1 or B.denominator != 1 or C.denominator != 1:
                continue
            h = int(B) % (2 * N)
            # in the sigma frame X is [0, 2Nb, -Ny]: l = l_X iff it runs upward iff b < 0
            delta = 1 if b < 0 else -1
            key = (abs(k), h)
            out[key] = out.get(key, Fraction(0)) - delta / (2 * cd.eps)
    return {key: v for key, v in out.items() if v != 0}


def unary_k_max(N: int, v: float, tol: float = 1e-14) -> int:
    """Truncation used by :func:`unary_theta_eval` (exponent ``2 pi v k^2/4N``)."""
    return int(math.ceil(math.sqrt((math.log(1 / tol) + 10) * 4 * N / (2 * math.pi * v)))) + 2


def unary_theta_eval(cusp_idx: int, N: int, tau: complex, tol: float = 1e-14) -> np.ndarray:
    """``Theta_l(tau)`` as a vector indexed by ``h in Z/2N``.

    The omitted terms are bounded by ``unary_tail_bound(N, tau, unary_k_max(N, v, tol))``.
    """
    tau = complex(tau)
    k_max = unary_k_max(N, tau.imag, tol)
    coeffs = unary_theta_coeffs(cusp_idx, N, k_max)
    vec = np.zeros(2 * N, dtype=complex)
    for (k, h), c in coeffs.items():
        vec[h] += c * cmath.exp(2j * math.pi * tau * k * k / (4 * N))
    return vec


def unary_tail_bound(N: int, tau: complex, k_max: int) -> float:
    """Bound for the omitted terms ``k > k_max`` (each ``|b| <= 2 beta N sqrt N k``)."""
    v = complex(tau).imag
    tot = 0.0
    k = k_max + 1
    while True:
        t = 2 * N * math.sqrt(N) * k * math.exp(-2 * math.pi * v * k * k / (4 * N))
        tot += 2 * t
        if t < 1e-30:
            return tot
        k += 1


# --- boundary asymptotics -----------------------------------------------------------------

def orbit_sum_near_cusp(f: QuadForm, N: int, cusp_idx: int, x: float, y: float, v: float = 1.0,
                        R: float = 8.0) -> Tuple[float, float]:
    """``sum_{Y in Gamma0(N) X} psi~^0(sqrt(v) Y, z)`` at ``z = sigma_l (x + iy)``.

    Forms whose chart image ``Y|sigma_l`` has ``a != 0`` satisfy
    ``|d| >= |a| y - D/(4|a| y)``; they are dropped and bounded.  Returns
    ``(value, tail bound)``.
    """
    D = f.disc
    k = math.isqrt(D)
    if k * k != D:
        raise ValueError("form must be split-hyperbolic")
    sig = cusp_classes(N)[cusp_idx].sigma
    sinv = mat_inv(sig)
    w = complex(x, y)
    c = math.sqrt(math.pi * v / N)
    total = 0.0
    cmax = int(math.ceil(R * y / c + k * abs(x))) + 1
    for b in (k, -k):
        for cc in range(-cmax, cmax + 1):
            F = QuadForm(0, b, cc)
            Y = F.act(sinv)
            if Y.a % N or not gamma0_equivalent(Y, f, N):
                continue
            total += psi_tilde0(F, w, v, N)
    dmin = y - D / (4 * y)
    # at most (number of (a, b, c) with a != 0 in reach) terms, each < erfc(c dmin)/2
    tail = erfc(c * min(dmin, R)) * (4 * D + 8 * cmax)
    return total, tail


def boundary_prediction(f: QuadForm, N: int, cusp_idx: int, x: float) -> float:
    """``-B1((x - r_X)/alpha) + B1((x - r_-X)/alpha)``, each term present when that end lies at the cusp."""
    alpha = cusp_classes(N)[cusp_idx].width
    out = 0.0
    for sg, g in ((1, f), (-1, -f)):
        r, _, idx = split_real_part(g, N)
        if idx == cusp_idx:
            out += -sg * B1((x - float(r)) / alpha)
    return out
