"""Regularized cycle integrals, winding numbers and twisted traces."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from scipy.integrate import quad
from scipy.optimize import brentq

from .hyperbolic import (GeodesicArc, bernoulli1, cusp_classes, dpar_exact, geodesic, mobius,
                         reduce_to_F, split_real_part)
from .modfun import ThirdKindForm, eval_j
from .qforms import (GenusCharContext, PreconditionError, QuadForm, enumerate_classes, genus_character,
                     is_fundamental, kronecker, mat_inv)

TWO_PI_I = 2j * math.pi


class ConvergenceError(ArithmeticError):
    pass


@dataclass
class CycleIntegralResult:
    value: complex
    method: str
    pv_corrections: List[Tuple[complex, Tuple[complex, complex]]] = field(default_factory=list)
    split_log_coefficient: Fraction = Fraction(0)

    @property
    def index(self) -> complex:
        return self.value / TWO_PI_I


# --- path assembly -------------------------------------------------------------------

@dataclass
class _Path:
    arc: GeodesicArc
    s0: float
    s1: float
    poles: List[Tuple[float, complex]]        # (parameter, pole) sorted


def _pole_candidate(z: complex):
    """The ``SL2(Z)``-translate of ``i`` nearest to ``z`` (exact data)."""
    w, g = reduce_to_F(z)
    (a, b), (c, d) = g
    # zeta = g^-1 i = (d i - b)/(-c i + a)
    n = a * a + c * c
    x = Fraction(-(a * b + c * d), n)
    y2 = Fraction(1, n * n)
    return w, x, y2


def _find_poles(arc: GeodesicArc, s0: float, s1: float, step: float = 0.02) -> List[Tuple[float, complex]]:
    found = {}
    n = max(8, int(math.ceil((s1 - s0) / step)))
    for k in range(n + 1):
        s = s0 + (s1 - s0) * k / n
        z = arc.point(s)
        w, x, y2 = _pole_candidate(z)
        # hyperbolic distance from w to i below ~0.1
        if abs(w - 1j) < 0.1 and dpar_exact(arc.form, x, y2) == 0:
            if (x, y2) not in found:
                zeta = complex(float(x), math.sqrt(float(y2)))
                found[(x, y2)] = zeta
    out = []
    for zeta in found.values():
        sp = arc.param_of(zeta)
        if s0 <= sp < s1:
            out.append((sp, zeta))
    return sorted(out, key=lambda t: t[0])


def _closed_path(f: QuadForm, N: int, base_s: float) -> _Path:
    arc = geodesic(f, N, base_s)
    P = arc.period
    poles = _find_poles(arc, base_s, base_s + P)
    s0 = base_s
    if poles:
        # put the base point in the middle of the widest gap between poles
        ps = [sp for sp, _ in poles] + [poles[0][0] + P]
        k = max(range(len(ps) - 1), key=lambda i: ps[i + 1] - ps[i])
        if ps[k + 1] - ps[k] < 0.3:
            raise ConvergenceError("poles too dense on the cycle")
        s0 = (ps[k] + ps[k + 1]) / 2
    # a pole moved by a period is the automorph image of the original
    shifted = []
    for sp, z in poles:
        sp2 = (sp - s0) % P + s0
        shifted.append((sp2, z if sp2 == sp else arc.point(sp2)))
    shifted.sort(key=lambda t: t[0])
    return _Path(arc, s0, s0 + P, shifted)


def _height_param(arc: GeodesicArc, sigma, T: float, upper: bool) -> float:
    """Parameter ``s`` where ``Im(sigma^-1 z(s)) = T`` at the chosen end."""
    sinv = mat_inv(sigma)
    sg = 1.0 if upper else -1.0

    def h(s):
        # increasing in s: sigma^-1 c_X is a vertical line
        return sg * (mobius(sinv, arc.point(s)).imag - T)
    lo, hi = -1.0, 1.0
    while h(lo) > 0:
        lo *= 2
    while h(hi) < 0:
        hi *= 2
    return brentq(h, lo, hi, xtol=1e-14, rtol=1e-15)


@dataclass(frozen=True)
class SplitData:
    r_end: Fraction
    sigma_end: tuple
    cusp_end: int
    r_start: Fraction
    sigma_start: tuple
    cusp_start: int


def split_data(f: QuadForm, N: int) -> SplitData:
    r1, s1, c1 = split_real_part(f, N)
    r0, s0, c0 = split_real_part(-f, N)
    return SplitData(r1, s1, c1, r0, s0, c0)


def _split_path(f: QuadForm, N: int, T: float) -> _Path:
    arc = geodesic(f, N)
    sd = split_data(f, N)
    s1 = _height_param(arc, sd.sigma_end, T, True)
    s0 = _height_param(arc, sd.sigma_start, T, False)
    poles = _find_poles(arc, s0, s1)
    return _Path(arc, s0, s1, poles)


# --- principal value detours ------------------------------------------------------------

def _detour(arc: GeodesicArc, sp: float, zeta: complex):
    rho = 0.1 * zeta.imag

    def dist(s):
        return abs(arc.point(s) - zeta) - rho
    d = 0.05
    while dist(sp - d) < 0 or dist(sp + d) < 0:
        d *= 2
    s_in = brentq(dist, sp - d, sp, xtol=1e-15)
    s_out = brentq(dist, sp, sp + d, xtol=1e-15)
    th_in = cmath.phase(arc.point(s_in) - zeta)
    th_out = cmath.phase(arc.point(s_out) - zeta)
    ccw = (th_in, th_in + (th_out - th_in) % (2 * math.pi))
    cw = (th_in, th_in - (th_in - th_out) % (2 * math.pi))
    return s_in, s_out, rho, ccw, cw


def _segments(path: _Path):
    """Pieces ``("line", s_a, s_b)`` and ``("pole", zeta, rho, ccw, cw)``."""
    out = []
    s = path.s0
    for sp, zeta in path.poles:
        s_in, s_out, rho, ccw, cw = _detour(path.arc, sp, zeta)
        out.append(("line", s, s_in))
        out.append(("pole", zeta, rho, ccw, cw))
        s = s_out
    out.append(("line", s, path.s1))
    return out


def _cquad(fn, a, b, tol):
    # complex_func=True silently ignores reversed limits
    if b < a:
        return -_cquad(fn, b, a, tol)
    val, err = quad(fn, a, b, complex_func=True, epsabs=tol, epsrel=tol, limit=400)
    return val


def _integrate_path(eta: ThirdKindForm, path: _Path, tol: float):
    arc = path.arc
    total = 0j
    pv = []

    def on_line(s):
        z, dz = arc.point_and_velocity(s)
        return eta(z) * dz
    for seg in _segments(path):
        if seg[0] == "line":
            _, a, b = seg
            # split long stretches so quad sees the oscillation
            n = max(1, int(math.ceil((b - a) / 0.5)))
            for k in range(n):
                total += _cquad(on_line, a + (b - a) * k / n, a + (b - a) * (k + 1) / n, tol)
        else:
            _, zeta, rho, ccw, cw = seg

            def on_circle(t, zeta=zeta, rho=rho):
                u = rho * cmath.exp(1j * t)
                return eta(zeta + u) * 1j * u
            vals = []
            for t0, t1 in (ccw, cw):
                v = 0j
                n = 4
                for k in range(n):
                    v += _cquad(on_circle, t0 + (t1 - t0) * k / n, t0 + (t1 - t0) * (k + 1) / n, tol)
                vals.append(v)
            pv.append((zeta, (vals[0], vals[1])))
            total += (vals[0] + vals[1]) / 2
    return total, pv


def _richardson(values: Sequence[complex], ratio: float, powers: Sequence[float]) -> Tuple[complex, float]:
    """Eliminate error terms ``eps^p`` from values at ``eps, eps/ratio, ...``."""
    row = list(values)
    last = None
    for p in powers:
        if len(row) < 2:
            break
        f = ratio ** p
        new = [(f * row[k + 1] - row[k]) / (f - 1) for k in range(len(row) - 1)]
        last = row
        row = new
    best = row[-1]
    spread = abs(row[-1] - row[-2]) if len(row) > 1 else abs(best - last[-1])
    return best, spread


def _split_log_coefficient(eta: ThirdKindForm, sd: SplitData) -> Fraction:
    cds = cusp_classes(eta.N)
    r1 = Fraction(eta.residue_at_cusp(sd.cusp_end), cds[sd.cusp_end].width)
    r0 = Fraction(eta.residue_at_cusp(sd.cusp_start), cds[sd.cusp_start].width)
    return r1 - r0


def _split_value(eta: ThirdKindForm, f: QuadForm, N: int, eps: float, tol: float):
    T = -math.log(eps) / (2 * math.pi)
    path = _split_path(f, N, T)
    val, pv = _integrate_path(eta, path, tol)
    coeff = _split_log_coefficient(eta, split_data(f, N))
    return val - float(coeff) * math.log(eps), pv, coeff


def _split_ladder(eta, f, N, ratio, ks, tol):
    widths = [cd.width for cd in cusp_classes(N)]
    a = math.lcm(*widths)
    vals = [_split_value(eta, f, N, ratio ** (-k), tol)[0] for k in ks]
    powers = [j / a for j in range(1, len(ks))]
    return _richardson(vals, ratio, powers)


def cycle_integral(eta: ThirdKindForm, f: QuadForm, N: int = 1, tol: float = 1e-9,
                   base_s: float = 0.123) -> CycleIntegralResult:
    """``int_{c(X)} eta`` with the principal value at poles on the cycle."""
    if f.disc <= 0:
        raise PreconditionError("needs positive discriminant")
    if f.a % N:
        raise PreconditionError("form is not in Q_N")
    if eta.N != N:
        eta = ThirdKindForm(eta.sign, N)
    arc = geodesic(f, N, base_s)
    qtol = min(tol, 1e-10) * 1e-2
    if not arc.split:
        path = _closed_path(f, N, base_s)
        val, pv = _integrate_path(eta, path, qtol)
        return CycleIntegralResult(val, "quadrature", pv)
    v2, sp2 = _split_ladder(eta, f, N, 2.0, list(range(18, 23)), qtol)
    v3, sp3 = _split_ladder(eta, f, N, 3.0, list(range(11, 15)), qtol)
    if abs(v2 - v3) > max(tol, 10 * (sp2 + sp3)) and abs(v2 - v3) > 1e-7:
        raise ConvergenceError("split regularization unstable: %g" % abs(v2 - v3))
    _, pv, coeff = _split_value(eta, f, N, 2.0 ** -22, qtol)
    return CycleIntegralResult(v2, "quadrature", pv, coeff)


# --- argument tracking -------------------------------------------------------------------

def _jm(z: complex) -> complex:
    return eval_j(z) - 1728


def _track(fn, a: float, b: float, n: int, depth: int = 40) -> float:
    """Continuous change of ``arg fn`` over ``[a, b]`` with adaptive refinement."""
    total = 0.0
    xs = [a + (b - a) * k / n for k in range(n + 1)]
    vals = [fn(x) for x in xs]
    stack = [(xs[k], xs[k + 1], vals[k], vals[k + 1], 0) for k in range(n)][::-1]
    while stack:
        x0, x1, v0, v1, dep = stack.pop()
        d = cmath.phase(v1 / v0)
        if abs(d) > math.pi / 4:
            if dep > depth:
                raise ArithmeticError("refinement depth exceeded while tracking the argument")
            xm = (x0 + x1) / 2
            vm = fn(xm)
            stack.append((xm, x1, vm, v1, dep + 1))
            stack.append((x0, xm, v0, vm, dep + 1))
            continue
        total += d
    return total


def winding_index(f: QuadForm, N: int = 1, tol: float = 1e-9, eta: Optional[ThirdKindForm] = None,
                  split_height: float = 6.0, base_s: float = 0.123) -> complex:
    """``(1/2 pi i) int_{c(X)} dlog(j - 1728)`` by following ``arg(j - 1728)``.

    Poles of the integrand on the cycle are bypassed both ways and the two
    results averaged, which yields half-integers on the quotient.
    """
    sign = 1 if eta is None else eta.sign
    if f.disc <= 0:
        raise PreconditionError("needs positive discriminant")
    arc = geodesic(f, N, base_s)
    path = _closed_path(f, N, base_s) if not arc.split else _split_path(f, N, split_height)
    darg = 0.0
    for seg in _segments(path):
        if seg[0] == "line":
            _, a, b = seg
            n = max(8, int(math.ceil((b - a) / 0.02)))
            darg += _track(lambda s: _jm(arc.point(s)), a, b, n)
        else:
            _, zeta, rho, ccw, cw = seg
            both = [_track(lambda t: _jm(zeta + rho * cmath.exp(1j * t)), t0, t1, 64) for t0, t1 in (ccw, cw)]
            darg += sum(both) / 2
    dlogmod = 0.0
    if arc.split:
        dlogmod = math.log(abs(_jm(arc.point(path.s1)))) - math.log(abs(_jm(arc.point(path.s0))))
    return sign * complex(darg, -dlogmod) / (2 * math.pi)


# --- traces --------------------------------------------------------------------------

def L0(Delta: int) -> Fraction:
    """``sum_{C mod |Delta|} (Delta/C) B_1(-C/|Delta|)``."""
    if Delta >= 0 or not is_fundamental(Delta):
        raise PreconditionError("Delta must be a negative fundamental discriminant")
    a = abs(Delta)
    return sum((kronecker(Delta, C) * bernoulli1(Fraction(-C, a)) for C in range(a)), Fraction(0))


@dataclass
class TraceEntry:
    d: int
    trace: float
    classes: List[Tuple[QuadForm, int, complex]]
    trace_winding: Optional[float] = None


@dataclass
class TraceTable:
    Delta: int
    N: int
    constant: Optional[Fraction]
    entries: Dict[int, TraceEntry]

    def to_json(self) -> dict:
        out = {"Delta": self.Delta, "N": self.N, "entries": []}
        if self.constant is not None:
            out["constant"] = "%d/%d" % (self.constant.numerator, self.constant.denominator)
        for d in sorted(self.entries):
            e = self.entries[d]
            out["entries"].append({
                "d": d, "trace": e.trace,
                "classes": [{"form": f.as_list(), "chi": chi, "ind": ind.real} for f, chi, ind in e.classes],
            })
        return out


def admissible_d(Delta: int, N: int, d_max: int) -> List[int]:
    return [d for d in range(1, d_max + 1) if d % 4 in (0, 3) and (-d * Delta) % 4 in (0, 1)]


def trace(Delta: int, r: int, N: int, d: int, eta: ThirdKindForm, tol: float = 1e-9,
          method: str = "quadrature") -> TraceEntry:
    """Twisted trace ``sum chi(X)/(2 pi i) int_{c(X)} eta`` over ``Gamma0(N)\\Q_{N,-d Delta}``."""
    ctx = GenusCharContext(Delta, r, N)
    D = -d * Delta
    if D <= 0:
        raise PreconditionError("need -d Delta > 0")
    classes = []
    total = 0j
    for f in enumerate_classes(N, D):
        chi = genus_character(ctx, f)
        if chi == 0:
            continue
        if method == "quadrature":
            ind = cycle_integral(ThirdKindForm(eta.sign, N), f, N, tol).index
        elif method == "winding":
            ind = winding_index(f, N, tol, eta)
        else:
            raise ValueError("unknown method %r" % method)
        classes.append((f, chi, ind))
        total += chi * ind
    if abs(total.imag) > max(1e-6, 100 * tol):
        raise ConvergenceError("trace has a non-negligible imaginary part %g" % total.imag)
    return TraceEntry(d, total.real, classes)


def generating_series(Delta: int, r: int, N: int, eta: ThirdKindForm, d_max: int, tol: float = 1e-9,
                      with_winding: bool = True) -> TraceTable:
    if d_max < 3:
        raise PreconditionError("d_max must be at least 3")
    entries = {}
    for d in admissible_d(Delta, N, d_max):
        e = trace(Delta, r, N, d, eta, tol)
        if not e.classes:
            continue
        if with_winding and N == 1:
            e.trace_winding = trace(Delta, r, N, d, eta, tol, method="winding").trace
        entries[d] = e
    const = L0(Delta) if N == 1 else None
    return TraceTable(Delta, N, const, entries)
