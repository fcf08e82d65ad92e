"""Numerical and exact checks behind ``windingseries verify``.

Each check returns a :class:`CheckResult` carrying the largest residual it
saw and the threshold it was held to.  ``perturb`` shifts one side of the
comparison and exists only so the harness can be made to fail on purpose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from .cycles import L0, admissible_d, trace
from .hyperbolic import bernoulli1, cusp_classes, reduce_to_F
from .lattice import (MetaplecticElement, apply_rho_S, apply_rho_T, gamma0_discriminant_form, rho_S, rho_T,
                      slash_action, twist_map, twisted_discriminant_form)
from .mock import (Cusp, Point, Sig21Lattice, mock_theta_f, mock_theta_omega, shimura_block,
                   twisted_hol_coeff, zwegers_hol_coeff, zwegers_vector)
from .modfun import JLOG, ThirdKindForm
from .qforms import GenusCharContext, QuadForm, genus_character, is_fundamental
from .theta import (CoeffFn, boundary_prediction, lower_table, orbit_sum_near_cusp, periodic_G,
                    siegel_theta_Delta, theta_lower, theta_star, unary_k_max, unary_tail_bound,
                    unary_theta_coeffs, unary_theta_eval, unary_theta_lemma)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    residual: float
    threshold: float
    details: Dict[str, object] = field(default_factory=dict)

    def line(self) -> str:
        return "criterion %2d %-34s %s  residual=%.3e  threshold=%.1e" % (
            self.number, self.name, "PASS" if self.passed else "FAIL", self.residual, self.threshold)

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "residual": self.residual, "threshold": self.threshold, "details": self.details}


def _result(number, name, residual, threshold, details=None, extra_ok=True) -> CheckResult:
    residual = float(residual)
    ok = bool(extra_ok) and residual < threshold
    return CheckResult(number, name, ok, residual, threshold, details or {})


# --- 1 ------------------------------------------------------------------------------

def class_number(D: int) -> int:
    """Number of reduced primitive positive definite forms of discriminant ``D < 0``."""
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                h += 1
        a += 1
    return h


def unit_count(D: int) -> int:
    return {-3: 6, -4: 4}.get(D, 2)


def check_class_numbers(perturb: float = 0.0) -> CheckResult:
    bad = []
    count = 0
    for D in range(-199, 0):
        if not is_fundamental(D):
            continue
        count += 1
        lhs = L0(D) + Fraction(perturb).limit_denominator(10 ** 9)
        rhs = Fraction(2 * class_number(D), unit_count(D))
        if lhs != rhs:
            bad.append(D)
    return _result(1, "L(0,D) = 2h/w", len(bad), 0.5, {"discriminants": count, "mismatches": bad})


# --- 2 ------------------------------------------------------------------------------

def check_trace_routes(d_max: int = 20, tol: float = 1e-9, perturb: float = 0.0) -> CheckResult:
    worst = 0.0
    rows = []
    for Delta, r in ((-3, 1), (-4, 0)):
        for d in admissible_d(Delta, 1, d_max):
            q = trace(Delta, r, 1, d, JLOG, tol, method="quadrature").trace + perturb
            w = trace(Delta, r, 1, d, JLOG, tol, method="winding").trace
            worst = max(worst, abs(q - w))
            rows.append({"Delta": Delta, "d": d, "quadrature": q, "winding": w})
    return _result(2, "trace: winding vs quadrature", worst, 1e-6, {"rows": rows})


# --- 3 ------------------------------------------------------------------------------

def erfc_lowering_rule_symbolic() -> bool:
    """``d/dv (s erfc(a sqrt v)/2) = -s a exp(-a^2 v) / (2 sqrt(pi v))`` via sympy."""
    import sympy as sp
    v, a, s = sp.symbols("v a s", positive=True)
    lhs = sp.diff(s * sp.erfc(a * sp.sqrt(v)) / 2, v)
    rhs = -s * a * sp.exp(-a * a * v) / (2 * sp.sqrt(sp.pi * v))
    return sp.simplify(lhs - rhs) == 0


def _richardson_derivative(fn: Callable[[float], complex], v: float, h: float = 1e-3) -> complex:
    d1 = (fn(v + h) - fn(v - h)) / (2 * h)
    d2 = (fn(v + h / 2) - fn(v - h / 2)) / h
    return (4 * d2 - d1) / 3


def _gauss_dict(c: CoeffFn) -> Dict[float, float]:
    out: Dict[float, float] = {}
    for b, amp in c.gauss_terms.items():
        key = round(b, 9)
        out[key] = out.get(key, 0.0) + amp
    return {k: a for k, a in out.items() if abs(a) > 1e-300}


def check_lowering(d_max: int = 12, perturb: float = 0.0) -> CheckResult:
    eta = ThirdKindForm(-1)
    term_res = 0.0
    fd_res = 0.0
    for Delta, r in ((-3, 1), (-4, 0)):
        star, _ = theta_star(Delta, r, 1, eta, d_max)
        low = lower_table(star)
        ref = theta_lower(Delta, r, 1, eta, d_max)
        for d in set(low.coeffs) | set(ref.coeffs):
            a = _gauss_dict(low.coeffs.get(d, CoeffFn()))
            b = _gauss_dict(ref.coeffs.get(d, CoeffFn()))
            for k in set(a) | set(b):
                term_res = max(term_res, abs(a.get(k, 0.0) + perturb - b.get(k, 0.0)))
        for d, c in star.coeffs.items():
            erfc_part = CoeffFn(erfc_terms=dict(c.erfc_terms))
            for v in (0.5, 1.0, 2.0):
                fd = _richardson_derivative(erfc_part, v)
                lowered = ref.coeffs[d](v) if d in ref.coeffs else 0.0
                fd_res = max(fd_res, abs(v * v * fd - lowered), abs(erfc_part.derivative(v) - fd))
    sym = erfc_lowering_rule_symbolic()
    return _result(3, "lowering of the completion", term_res, 1e-12,
                   {"symbolic_rule": sym, "termwise": term_res, "finite_difference": fd_res},
                   extra_ok=sym and fd_res < 1e-7)


# --- 4 ------------------------------------------------------------------------------

def check_siegel(perturb: float = 0.0) -> CheckResult:
    eta = ThirdKindForm(-1)
    tau2, _ = reduce_to_F((1 + 2j) / 3)
    worst = 0.0
    rows = []
    for Delta, r in ((-3, 1), (-4, 0)):
        tab = theta_lower(Delta, r, 1, eta, d_max=12, v_min=0.9, tol=1e-13)
        for tau in (1j, tau2):
            lhs = tab(tau) + perturb
            rhs = tau.imag ** 1.5 * siegel_theta_Delta(Delta, tau).conjugate()
            # Gaussian tail beyond the truncation radius, crude geometric majorant
            tail = 4 * tab.s_max ** 3 * math.exp(-4 * math.pi * tau.imag * tab.s_max ** 2 / abs(Delta))
            worst = max(worst, abs(lhs - rhs) + tail)
            rows.append({"Delta": Delta, "tau": [tau.real, tau.imag], "residual": abs(lhs - rhs), "tail": tail})
    return _result(4, "Siegel theta vs shadow table", worst, 1e-8, {"rows": rows})


# --- 5 ------------------------------------------------------------------------------

TWIST_CASES = {1: (-3, 1), 2: (-4, 2), 3: (-3, 3), 4: (-7, 3)}


def _twist_residual(N: int, Delta: int, r: int) -> float:
    dL = gamma0_discriminant_form(N)
    dD = twisted_discriminant_form(N, Delta)
    ctx = GenusCharContext(Delta, r, N)
    tw = twist_map(dL, dD, N, Delta, r, lambda h: genus_character(ctx, QuadForm(N * h[0], h[1], h[2])))

    def psi(vec):
        out: Dict[tuple, complex] = {}
        for h, c in vec.items():
            for delta, x in tw[h].items():
                out[delta] = out.get(delta, 0) + c * x
        return out

    S, T = rho_S(dL), rho_T(dL)
    worst = 0.0
    for h in dL.elements:
        img = psi({h: 1.0})
        j = dL.index(h)
        for mat, act in ((S, apply_rho_S), (T, apply_rho_T)):
            lhs = psi({mu: mat[dL.index(mu), j] for mu in dL.elements})
            rhs = act(dD, img)
            for k in set(lhs) | set(rhs):
                worst = max(worst, abs(lhs.get(k, 0) - rhs.get(k, 0)))
    return worst


def check_weil(perturb: float = 0.0) -> CheckResult:
    rows = []
    worst = 0.0
    for N in (1, 2, 3, 4):
        dL = gamma0_discriminant_form(N)
        S, T = rho_S(dL), rho_T(dL)
        S = S + perturb
        uni = np.max(np.abs(S @ S.conj().T - np.eye(dL.order)))
        rel = np.max(np.abs(np.linalg.matrix_power(S @ T, 3) - S @ S))
        Delta, r = TWIST_CASES[N]
        tw = _twist_residual(N, Delta, r)
        worst = max(worst, uni, rel, tw)
        rows.append({"N": N, "unitary": float(uni), "ST3": float(rel), "twist": tw, "Delta": Delta})
    return _result(5, "Weil representation relations", worst, 1e-12, {"rows": rows})


# --- 6 ------------------------------------------------------------------------------

def check_unary(levels=(1, 2, 3, 4), k_max: int = 12, perturb: float = 0.0) -> CheckResult:
    taus = (1j, 1 + 1j, (1 + 3j) / 2)
    worst = 0.0
    tail = 0.0
    agree = True
    for N in levels:
        dL = gamma0_discriminant_form(N)
        for idx in range(len(cusp_classes(N))):
            def F(t, idx=idx, N=N):
                return unary_theta_eval(idx, N, t) + perturb * t.imag
            for tau in taus:
                tail = max(tail, unary_tail_bound(N, tau, unary_k_max(N, tau.imag)))
                for w in ("S", "T"):
                    g = MetaplecticElement(w)
                    res = slash_action(F, Fraction(3, 2), g, tau) - g.rho(dL) @ F(tau)
                    worst = max(worst, float(np.max(np.abs(res))))
            direct = unary_theta_coeffs(idx, N, k_max)
            lemma = unary_theta_lemma(idx, N, k_max)
            agree = agree and set(direct) == set(lemma) and all(
                abs(direct[k] - math.sqrt(N) * float(lemma[k])) < 1e-12 for k in direct)
    return _result(6, "unary theta modularity", worst + tail, 1e-8,
                   {"transformation": worst, "tail_bound": tail, "coefficient_routes_agree": agree},
                   extra_ok=agree)


# --- 7 ------------------------------------------------------------------------------

def check_periodic_G(perturb: float = 0.0) -> CheckResult:
    xs = [(k + 0.5) / 20 - 0.5 + 0.013 for k in range(20)]
    grid = 0.0
    for x in xs:
        for kappa in (0.1, 1.0, 10.0):
            grid = max(grid, abs(periodic_G(x, kappa, "direct") + perturb - periodic_G(x, kappa, "fourier")))
    # G tends to -B1 as kappa -> 0; for kappa -> oo it tends to 0 instead
    limit = max(abs(periodic_G(x, 1e-4, "direct") + bernoulli1(x)) for x in xs)
    literal = max(abs(periodic_G(x, 1e4, "direct") + bernoulli1(x)) for x in xs)
    return _result(7, "periodic G: direct vs Fourier", max(grid, limit), 1e-10,
                   {"grid": grid, "limit_kappa_1e-4": limit, "kappa_1e4_vs_minus_B1": literal},
                   extra_ok=limit < 1e-8)


# --- 8 ------------------------------------------------------------------------------

ZWEGERS_POINTS = (1j, 0.3 + 0.6j, 0.37 + 0.41j)


def check_zwegers(levels=(1, 2, 3, 4), perturb: float = 0.0) -> CheckResult:
    S = MetaplecticElement("S")
    worst = 0.0
    anti = True
    for N in levels:
        lat = Sig21Lattice(N)
        pairs = [(Point(z), Cusp(idx)) for z in ZWEGERS_POINTS[:2] for idx in range(len(cusp_classes(N)))]
        pairs.append((Point(ZWEGERS_POINTS[0]), Point(ZWEGERS_POINTS[2])))
        for c1, c2 in pairs:
            def F(t, c1=c1, c2=c2):
                return zwegers_vector(lat, c1, c2, t) + perturb
            for tau in (1j, 0.3 + 1.1j):
                res = slash_action(F, Fraction(3, 2), S, tau) - S.rho(lat.dform) @ F(tau)
                worst = max(worst, float(np.max(np.abs(res))))
            for h in range(2 * N):
                for D in range(0, 4 * N * 3 + 1):
                    m = Fraction(D, 4 * N)
                    anti = anti and zwegers_hol_coeff(lat, c1, c2, h, m) == -zwegers_hol_coeff(lat, c2, c1, h, m)
    genus0 = 0.0
    for Delta, r in ((-3, 1), (-4, 0)):
        for d in admissible_d(Delta, 1, 12):
            hol = twisted_hol_coeff(Delta, r, 1, Point(1j), Cusp(0), d)
            genus0 = max(genus0, abs(float(hol) + trace(Delta, r, 1, d, JLOG, 1e-9).trace))
    lat1 = Sig21Lattice(1)
    untwisted = max(abs(zwegers_hol_coeff(lat1, Point(1j), Cusp(0), h, Fraction(D, 4)))
                    for h in (0, 1) for D in range(0, 21))
    genus0 = max(genus0, float(untwisted))
    return _result(8, "indefinite theta (signature 2,1)", max(worst, genus0), 1e-6,
                   {"S_residual": worst, "antisymmetry_exact": anti, "genus_zero_trace": genus0},
                   extra_ok=anti)


# --- 9 ------------------------------------------------------------------------------

def check_shimura(n_terms: int = 48, perturb: float = 0.0) -> CheckResult:
    f_ok = mock_theta_f(40) == mock_theta_f(40, "nested")
    w_ok = mock_theta_omega(40) == mock_theta_omega(40, "nested")
    blk = shimura_block(n_terms)
    mins = [m for m in blk["min_exponents"].values() if m is not None]
    smallest = min(mins) + Fraction(perturb).limit_denominator(10 ** 6) if mins else None
    decays = smallest is not None and smallest > 0
    fibers_ok = all(len(v) == 2 for v in blk["fibers"].values()) and len(blk["mus"]) == 144
    ok = f_ok and w_ok and decays and fibers_ok
    return CheckResult(9, "cancellation in the combination", ok, 0.0 if ok else 1.0, 0.5,
                       {"mock_f_routes": f_ok, "mock_omega_routes": w_ok, "fibers_ok": fibers_ok,
                        "smallest_exponent": str(smallest), "nonzero_components": len(mins)})


# --- 10 -----------------------------------------------------------------------------

BOUNDARY_CASES = ((QuadForm(0, 3, 1), 1), (QuadForm(1, 3, 2), 1), (QuadForm(4, 6, 2), 4), (QuadForm(2, 3, 1), 2))


def check_boundary(y: float = 10.0, perturb: float = 0.0) -> CheckResult:
    worst = 0.0
    rows = []
    for f, N in BOUNDARY_CASES:
        for idx, cd in enumerate(cusp_classes(N)):
            for x in (0.137, -0.31, 0.42 * cd.width):
                val, tail = orbit_sum_near_cusp(f, N, idx, x, y)
                pred = boundary_prediction(f, N, idx, x) + perturb
                worst = max(worst, abs(val - pred) + tail)
                rows.append({"form": f.as_list(), "N": N, "cusp": idx, "x": x, "sum": val, "prediction": pred})
    return _result(10, "boundary asymptotics", worst, 1e-6, {"rows": rows})


CHECKS: Dict[int, Callable[..., CheckResult]] = {
    1: check_class_numbers, 2: check_trace_routes, 3: check_lowering, 4: check_siegel, 5: check_weil,
    6: check_unary, 7: check_periodic_G, 8: check_zwegers, 9: check_shimura, 10: check_boundary,
}


def run_all(only: Optional[List[int]] = None, perturb: Optional[Dict[int, float]] = None) -> List[CheckResult]:
    perturb = perturb or {}
    out = []
    for n in sorted(only or CHECKS):
        out.append(CHECKS[n](perturb=perturb.get(n, 0.0)))
    return out
