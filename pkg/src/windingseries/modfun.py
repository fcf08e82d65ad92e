"""The j-invariant, its derivative and the third-kind differential dlog(j - 1728)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

import mpmath

from .hyperbolic import PrecisionError, cusp_classes, reduce_to_F

TWO_PI_I = 2j * math.pi


class PoleProximityError(ValueError):
    pass


# --- exact q-expansions ---------------------------------------------------------

@dataclass(frozen=True)
class QExpansion:
    """Truncated Laurent series ``sum_{n >= m0} c_n q^n``, known modulo ``q^prec``."""
    coeffs: Tuple
    m0: int = 0

    @property
    def prec(self) -> int:
        return self.m0 + len(self.coeffs)

    def __getitem__(self, n: int):
        k = n - self.m0
        if k < 0:
            return 0
        if k >= len(self.coeffs):
            raise IndexError("coefficient beyond truncation")
        return self.coeffs[k]

    def _trim(self, prec):
        return QExpansion(tuple(self.coeffs[:prec - self.m0]), self.m0)

    def __add__(self, other: "QExpansion") -> "QExpansion":
        m0 = min(self.m0, other.m0)
        prec = min(self.prec, other.prec)
        return QExpansion(tuple(self._get0(n) + other._get0(n) for n in range(m0, prec)), m0)

    def __sub__(self, other):
        return self + other.scale(-1)

    def _get0(self, n):
        k = n - self.m0
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def scale(self, c) -> "QExpansion":
        return QExpansion(tuple(c * x for x in self.coeffs), self.m0)

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        m0 = self.m0 + other.m0
        n = min(len(self.coeffs), len(other.coeffs))
        out = [0] * n
        a, b = self.coeffs, other.coeffs
        for i in range(n):
            if a[i]:
                for k in range(n - i):
                    out[i + k] += a[i] * b[k]
        return QExpansion(tuple(out), m0)

    def __truediv__(self, other: "QExpansion") -> "QExpansion":
        lead = other.coeffs[0]
        if lead == 0:
            raise ZeroDivisionError("leading coefficient must be non-zero")
        n = min(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            s = self.coeffs[k] - sum(out[i] * other.coeffs[k - i] for i in range(k))
            x = Fraction(s) / lead
            out.append(int(x) if x.denominator == 1 else x)
        return QExpansion(tuple(out), self.m0 - other.m0)

    def derivative_q(self) -> "QExpansion":
        """``q d/dq``."""
        return QExpansion(tuple((self.m0 + k) * c for k, c in enumerate(self.coeffs)), self.m0)

    def __call__(self, q):
        s = 0
        for c in reversed(self.coeffs):
            s = s * q + c
        return s * q ** self.m0 if self.m0 else s


def _sigma(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def E4(prec: int = 60) -> QExpansion:
    return QExpansion(tuple([1] + [240 * _sigma(n, 3) for n in range(1, prec)]))


@lru_cache(maxsize=None)
def E6(prec: int = 60) -> QExpansion:
    return QExpansion(tuple([1] + [-504 * _sigma(n, 5) for n in range(1, prec)]))


@lru_cache(maxsize=None)
def Delta(prec: int = 60) -> QExpansion:
    """``(E4^3 - E6^2)/1728`` as an exact integer series starting at ``q``."""
    e4, e6 = E4(prec + 1), E6(prec + 1)
    d = (e4 * e4 * e4 - e6 * e6).coeffs
    assert d[0] == 0
    return QExpansion(tuple(x // 1728 for x in d[1:prec + 1]), 1)


@lru_cache(maxsize=None)
def j_series(prec: int = 60) -> QExpansion:
    e4 = E4(prec + 2)
    return (e4 * e4 * e4)._trim(prec + 1) / Delta(prec + 1)


# --- evaluation --------------------------------------------------------------------

def _order(y: float, tol: float) -> int:
    return int(math.ceil((math.log(1 / tol) + 5) / (2 * math.pi * y))) + 10


def _series_vals(w: complex, tol: float, high: bool):
    M = _order(w.imag, tol)
    if M > 59:
        raise PrecisionError("tolerance %g not reachable by the cached expansions" % tol)
    if high:
        q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(w))
    else:
        q = cmath.exp(TWO_PI_I * w)
    e4 = QExpansion(E4().coeffs[:M])(q)
    e6 = QExpansion(E6().coeffs[:M])(q)
    dl = QExpansion(Delta().coeffs[:M], 1)(q)
    return e4, e6, dl


def eval_j(z: complex, tol: float = 1e-13, high: bool = False):
    """``j(z)`` through ``E4^3 / Delta`` at the reduced point."""
    w, _ = reduce_to_F(z)
    e4, e6, dl = _series_vals(w, tol, high)
    return e4 ** 3 / dl


def eval_jprime(z: complex, tol: float = 1e-13):
    """``dj/dz = -2 pi i E4^2 E6 / Delta`` carried back with ``(cz+d)^-2``."""
    w, g = reduce_to_F(z)
    e4, e6, dl = _series_vals(w, tol, False)
    c, d = g[1]
    return -TWO_PI_I * e4 * e4 * e6 / dl / (c * complex(z) + d) ** 2


def eval_eta_jlog(z: complex, tol: float = 1e-13, guard: float = 1e-6):
    """``g(z) = j'(z)/(j(z) - 1728)``, so that ``dlog(j - 1728) = g dz``."""
    z = complex(z)
    w, g = reduce_to_F(z)
    if abs(w - 1j) < guard:
        raise PoleProximityError("point too close to an elliptic point of order 2")
    e4, e6, dl = _series_vals(w, tol, False)
    c, d = g[1]
    return -TWO_PI_I * e4 * e4 / e6 / (c * z + d) ** 2


def eval_eta_via_j(z: complex, h: float = 1e-5) -> complex:
    """Independent route: ``j'`` by central differences of :func:`eval_j`."""
    jp = (eval_j(z + h) - eval_j(z - h)) / (2 * h)
    return jp / (eval_j(z) - 1728)


# --- the differential ------------------------------------------------------------

@dataclass(frozen=True)
class ThirdKindForm:
    """``eta = sign * dlog(j - 1728)`` pulled back to ``X0(N)``.

    With ``sign = +1`` the residue divisor is ``[i] - [oo]`` (residues taken
    in the orbifold coordinate at ``i`` and in ``q = e(z)`` at the cusp).
    """
    sign: int = 1
    N: int = 1
    tag: str = "jlog"

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __call__(self, z: complex, tol: float = 1e-13) -> complex:
        return self.sign * eval_eta_jlog(z, tol)

    def residue_at_cusp(self, idx: int) -> int:
        return -self.sign * cusp_classes(self.N)[idx].width

    def residue_at_i(self) -> int:
        return self.sign

    def residue_divisor(self) -> Dict[str, int]:
        if self.N != 1:
            raise NotImplementedError("only the level one divisor is tabulated")
        return {"i": self.sign, "oo": -self.sign}


JLOG = ThirdKindForm(1)


def residue_divisor(form: ThirdKindForm) -> Dict[str, int]:
    return form.residue_divisor()
