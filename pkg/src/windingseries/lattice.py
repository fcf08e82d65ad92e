"""Finite quadratic modules and the Weil representation.

Elements of a module are integer tuples reduced modulo ``moduli``; the
element ``x`` stands for the residue class ``(x_1/m_1, ..., x_r/m_r)``
of rationals mod 1.  All values of ``Q`` and of the bilinear form are
exact :class:`~fractions.Fraction` objects reduced into ``[0, 1)``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Element = Tuple[int, ...]


def frac_mod1(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


def e(x) -> complex:
    """``exp(2 pi i x)`` with the argument reduced mod 1 first."""
    if isinstance(x, Fraction):
        x = frac_mod1(x)
    return cmath.exp(2j * math.pi * float(x))


@dataclass(frozen=True)
class DiscriminantForm:
    moduli: Tuple[int, ...]
    q_values: Mapping[Element, Fraction]
    signature: Tuple[int, int]
    name: str = ""
    _index: Dict[Element, int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        idx = {h: k for k, h in enumerate(self.elements)}
        object.__setattr__(self, "_index", idx)

    @classmethod
    def from_quadratic(cls, moduli: Sequence[int], q: Callable[[Element], Fraction],
                       signature: Tuple[int, int], name: str = "") -> "DiscriminantForm":
        moduli = tuple(int(m) for m in moduli)
        vals = {}
        for h in itertools.product(*(range(m) for m in moduli)):
            vals[h] = frac_mod1(q(h))
        return cls(moduli, vals, tuple(signature), name)

    @property
    def elements(self) -> list:
        return list(self.q_values.keys())

    @property
    def order(self) -> int:
        return len(self.q_values)

    def index(self, h: Element) -> int:
        return self._index[self.reduce(h)]

    def reduce(self, h: Iterable[int]) -> Element:
        return tuple(int(x) % m for x, m in zip(h, self.moduli))

    def add(self, h: Element, mu: Element) -> Element:
        return self.reduce(a + b for a, b in zip(h, mu))

    def neg(self, h: Element) -> Element:
        return self.reduce(-a for a in h)

    def scale(self, k: int, h: Element) -> Element:
        return self.reduce(k * a for a in h)

    def Q(self, h: Element) -> Fraction:
        return self.q_values[self.reduce(h)]

    def bilinear(self, h: Element, mu: Element) -> Fraction:
        return frac_mod1(self.Q(self.add(h, mu)) - self.Q(h) - self.Q(mu))

    def as_rationals(self, h: Element) -> Tuple[Fraction, ...]:
        return tuple(Fraction(a, m) for a, m in zip(self.reduce(h), self.moduli))

    def to_json(self) -> dict:
        gens = []
        for k, m in enumerate(self.moduli):
            g = [0] * len(self.moduli)
            g[k] = 1
            gens.append(["%d/%d" % (1, m) if i == k else "0" for i in range(len(self.moduli))])
        return {
            "order": self.order,
            "generators": gens,
            "q_values": {",".join(str(x) for x in self.as_rationals(h)): "%d/%d" % (q.numerator, q.denominator)
                         for h, q in self.q_values.items()},
            "signature": list(self.signature),
        }


def gamma0_discriminant_form(N: int) -> DiscriminantForm:
    """``L'/L`` for the level ``N`` lattice: ``Z/2NZ`` with ``Q(b) = b^2/4N``."""
    if N < 1:
        raise ValueError("level must be positive")
    return DiscriminantForm.from_quadratic((2 * N,), lambda h: Fraction(h[0] ** 2, 4 * N), (2, 1),
                                           name="Gamma0(%d)" % N)


def twisted_discriminant_form(N: int, Delta: int) -> DiscriminantForm:
    """``L'/L_Delta`` for the rescaled lattice ``(Delta L, Q/Delta)``.

    Elements are ``(A mod |Delta|, B mod 2N|Delta|, C mod |Delta|)`` in the
    coordinates where ``[NA, B, C]`` is the attached quadratic form.  The
    rescaling by ``1/Delta`` (not ``1/|Delta|``) flips the signature to
    ``(1, 2)`` for ``Delta < 0``.
    """
    a = abs(Delta)

    def q(h):
        A, B, C = h
        return Fraction(B * B, 4 * N) / Delta - Fraction(A * C, Delta)

    sig = (2, 1) if Delta > 0 else (1, 2)
    return DiscriminantForm.from_quadratic((a, 2 * N * a, a), q, sig, name="L_Delta(%d,%d)" % (N, Delta))


# --- Weil representation ---------------------------------------------------

def rho_T(dform: DiscriminantForm) -> np.ndarray:
    return np.diag([e(dform.Q(h)) for h in dform.elements])


def rho_S(dform: DiscriminantForm) -> np.ndarray:
    els = dform.elements
    n = len(els)
    bp, bm = dform.signature
    pref = e(Fraction(-(bp - bm), 8)) / math.sqrt(n)
    # rows indexed by the image basis vector mu, columns by h
    M = np.empty((n, n), dtype=complex)
    for j, h in enumerate(els):
        for i, mu in enumerate(els):
            M[i, j] = pref * e(-dform.bilinear(h, mu))
    return M


def apply_rho_S(dform: DiscriminantForm, vec: Mapping[Element, complex]) -> Dict[Element, complex]:
    """Sparse ``rho(S) v`` without building the full matrix."""
    bp, bm = dform.signature
    pref = e(Fraction(-(bp - bm), 8)) / math.sqrt(dform.order)
    out = {}
    for mu in dform.elements:
        s = 0j
        for h, c in vec.items():
            if c != 0:
                s += c * e(-dform.bilinear(h, mu))
        out[mu] = pref * s
    return out


def apply_rho_T(dform: DiscriminantForm, vec: Mapping[Element, complex]) -> Dict[Element, complex]:
    return {h: c * e(dform.Q(h)) for h, c in vec.items()}


_LETTERS = {
    "S": ((0, -1), (1, 0)),
    "T": ((1, 1), (0, 1)),
    "t": ((1, -1), (0, 1)),
}


def _mat_mul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


@dataclass(frozen=True)
class MetaplecticElement:
    """A word in the generators ``S``, ``T`` and ``t = T^-1`` of ``Mp2(Z)``.

    The branch of ``sqrt(c tau + d)`` is never chosen directly; it is the
    product of the generator branches along the word (``S`` carries the
    principal ``sqrt(tau)``).
    """
    word: str

    def __post_init__(self):
        if any(ch not in _LETTERS for ch in self.word):
            raise ValueError("word letters must be in 'STt'")

    @property
    def matrix(self):
        m = ((1, 0), (0, 1))
        for ch in self.word:
            m = _mat_mul(m, _LETTERS[ch])
        return m

    def __mul__(self, other: "MetaplecticElement") -> "MetaplecticElement":
        return MetaplecticElement(self.word + other.word)

    def act(self, tau: complex):
        """Return ``(M tau, phi(tau))``."""
        phi = 1 + 0j
        z = complex(tau)
        for ch in reversed(self.word):
            if ch == "S":
                phi *= cmath.sqrt(z)
                z = -1 / z
            elif ch == "T":
                z = z + 1
            else:
                z = z - 1
        return z, phi

    def rho(self, dform: DiscriminantForm) -> np.ndarray:
        S, T = rho_S(dform), rho_T(dform)
        mats = {"S": S, "T": T, "t": np.conj(T)}
        out = np.eye(dform.order, dtype=complex)
        for ch in self.word:
            out = out @ mats[ch]
        return out


def slash_action(f: Callable[[complex], np.ndarray], k: Fraction, g: MetaplecticElement, tau: complex) -> np.ndarray:
    """``(f |_k g)(tau) = phi(tau)^(-2k) f(M tau)``."""
    if complex(tau).imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    z, phi = g.act(tau)
    two_k = Fraction(k) * 2
    if two_k.denominator != 1:
        raise ValueError("weight must be a half-integer")
    return phi ** (-int(two_k)) * np.asarray(f(z))


# --- twist ------------------------------------------------------------------

def twist_map(dform_L: DiscriminantForm, dform_LD: DiscriminantForm, N: int, Delta: int, r: int,
              chi: Callable[[Tuple[int, int, int]], int]) -> Dict[Element, Dict[Element, int]]:
    """Unnormalized twist ``e_h -> sum chi(delta) e_delta``.

    ``chi`` is evaluated on the ``L'`` coordinates ``(A, B, C)`` of a
    representative of ``delta``.  Returns a sparse map ``h -> {delta: chi}``.
    """
    if (Delta - r * r) % (4 * N) != 0:
        raise ValueError("Delta must be congruent to r^2 mod 4N")
    out = {}
    for h in dform_L.elements:
        target = (r * h[0]) % (2 * N)
        qh = dform_L.Q(h)
        fiber = {}
        for delta in dform_LD.elements:
            if delta[1] % (2 * N) != target:
                continue
            # Q(delta)/Delta as a value of the rescaled form equals Q_LD(delta)
            if dform_LD.Q(delta) != qh:
                continue
            c = chi(delta)
            if c:
                fiber[delta] = c
        out[h] = fiber
    return out


def twist_matrix(dform_L, dform_LD, twist) -> np.ndarray:
    M = np.zeros((dform_LD.order, dform_L.order), dtype=complex)
    for h, fiber in twist.items():
        j = dform_L.index(h)
        for delta, c in fiber.items():
            M[dform_LD.index(delta), j] += c
    return M


def scalarize(components: Mapping[Element, Mapping[Fraction, complex]], N: int) -> Dict[int, complex]:
    """Sum the components of a vector-valued series and rescale ``m -> 4Nm``."""
    out: Dict[int, complex] = {}
    for comp in components.values():
        for m, c in comp.items():
            d = Fraction(m) * 4 * N
            if d.denominator != 1:
                raise ArithmeticError("exponent %s is not integral after rescaling" % d)
            out[int(d)] = out.get(int(d), 0) + c
    return dict(sorted(out.items()))
