"""Command-line entry point: ``windingseries {classes,series,verify}``.

Exit codes: 0 success, 1 verification failure (or I/O error), 2 usage
error, 3 precision error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence

from .cycles import ConvergenceError, L0, trace
from .hyperbolic import PrecisionError
from .modfun import ThirdKindForm
from .qforms import GenusCharContext, PreconditionError, enumerate_classes, genus_character, is_fundamental
from .theta import theta_lower, theta_star
from .verify import CHECKS, run_all

SCHEMA_VERSION = 1
# theta tables are truncated for Im(tau) >= V_FLOOR; lower samples are refused
V_FLOOR = 0.25
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    Delta: int = -3
    r: int = 1
    N: int = 1
    d_max: int = 12
    tol: float = 1e-6
    taus: List[complex] = field(default_factory=lambda: [1j])
    output_path: Optional[str] = None
    format: str = "json"
    precision_mode: str = "standard"
    threads: int = 0
    only: Optional[List[int]] = None
    inject_failure: Optional[int] = None

    def validate(self, need_fundamental: bool = True):
        if not 1e-12 <= self.tol <= 1e-3:
            raise UsageError("--tol must lie in [1e-12, 1e-3]")
        if self.N < 1:
            raise UsageError("--level must be positive")
        if self.d_max < 1:
            raise UsageError("--dmax must be positive")
        if need_fundamental:
            if self.Delta >= 0 or not is_fundamental(self.Delta):
                raise UsageError("--delta must be a negative fundamental discriminant")
            if (self.r * self.r - self.Delta) % (4 * self.N):
                raise UsageError("--delta must be congruent to r^2 mod 4N")
        for t in self.taus:
            if t.imag <= 0:
                raise UsageError("tau samples must lie in the upper half-plane")

    @property
    def work_tol(self) -> float:
        return self.tol / 1000 if self.precision_mode == "high" else self.tol

    @property
    def workers(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


def parse_tau(text: str) -> complex:
    """``"u+vi"`` (``j`` also accepted) to a complex number."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if s in ("j", "+j"):
        return 1j
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError("cannot parse tau %r (expected u+vi)" % text)


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


def _frac(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator) if x.denominator != 1 else str(x.numerator)


def _complex(z: complex) -> List[float]:
    return [complex(z).real, complex(z).imag]


# --- classes ---------------------------------------------------------------------

def _class_row(args) -> dict:
    Delta, r, N, d = args
    D = -d * Delta
    row = {"d": d, "D": D, "classes": [], "chi": []}
    if D % 4 not in (0, 1):
        return row
    ctx = GenusCharContext(Delta, r, N)
    for f in enumerate_classes(N, D):
        row["classes"].append(f.as_list())
        row["chi"].append(genus_character(ctx, f))
    return row


def cmd_classes(cfg: RunConfig) -> dict:
    cfg.validate()
    rows = _pmap(_class_row, [(cfg.Delta, cfg.r, cfg.N, d) for d in range(1, cfg.d_max + 1)], cfg.workers)
    return {"schema": SCHEMA_VERSION, "kind": "classes", "N": cfg.N, "Delta": cfg.Delta, "r": cfg.r, "rows": rows}


def classes_csv(report: dict) -> List[List]:
    out = [["d", "D", "A", "B", "C", "chi"]]
    for row in report["rows"]:
        for f, chi in zip(row["classes"], row["chi"]):
            out.append([row["d"], row["D"]] + f + [chi])
    return out


# --- series ----------------------------------------------------------------------

def _trace_row(args) -> dict:
    Delta, r, N, d, tol = args
    # residue divisor [oo] - [i]: the sign that puts +L(0, Delta) in the constant term
    eta = ThirdKindForm(-1, N)
    row = {"d": d}
    row["trace"] = trace(Delta, r, N, d, eta, tol).trace
    if N == 1:
        row["trace_winding"] = trace(Delta, r, N, d, eta, tol, method="winding").trace
    return row


def cmd_series(cfg: RunConfig) -> dict:
    cfg.validate()
    Delta, r, N = cfg.Delta, cfg.r, cfg.N
    ds = [d for d in range(1, cfg.d_max + 1) if d % 4 in (0, 3) and (-d * Delta) % 4 in (0, 1)]
    rows = _pmap(_trace_row, [(Delta, r, N, d, cfg.work_tol) for d in ds], cfg.workers)
    eta = ThirdKindForm(-1, N)
    theta_tol = 1e-15 if cfg.precision_mode == "high" else 1e-13
    v_min = min([0.4] + [t.imag for t in cfg.taus])
    if v_min < V_FLOOR:
        raise PrecisionError("tau samples need Im(tau) >= %g; reduce them first" % V_FLOOR)
    star, const = theta_star(Delta, r, N, eta, cfg.d_max, v_min=v_min, tol=theta_tol)
    low = theta_lower(Delta, r, N, eta, cfg.d_max, v_min=v_min, tol=theta_tol)
    samples = [{"tau": _complex(t), "theta_star": _complex(star(t)), "theta": _complex(low(t))} for t in cfg.taus]
    G = [{"d": 0, "coefficient": _frac(L0(Delta))}] if N == 1 else []
    G += [{"d": row["d"], "coefficient": row["trace"], **({"winding": row["trace_winding"]}
                                                         if "trace_winding" in row else {})} for row in rows]
    return {"schema": SCHEMA_VERSION, "kind": "series", "N": N, "Delta": Delta, "r": r,
            "constant": _frac(const), "G": G, "theta_star": star.to_json(), "theta": low.to_json(),
            "samples": samples}


def series_csv(report: dict) -> List[List]:
    out = [["d", "coefficient"]]
    for row in report["G"]:
        out.append([row["d"], row["coefficient"]])
    return out


# --- verify ----------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> dict:
    only = cfg.only or sorted(CHECKS)
    bad = [n for n in only if n not in CHECKS]
    if bad:
        raise UsageError("unknown criterion %s" % bad)
    perturb = {cfg.inject_failure: 1e-3} if cfg.inject_failure else None
    results = run_all(only, perturb)
    return {"schema": SCHEMA_VERSION, "kind": "verify", "passed": all(r.passed for r in results),
            "failed": [r.number for r in results if not r.passed],
            "results": [r.to_json() for r in results]}


def verify_csv(report: dict) -> List[List]:
    out = [["criterion", "name", "passed", "residual", "threshold"]]
    for r in report["results"]:
        out.append([r["criterion"], r["name"], r["passed"], repr(r["residual"]), r["threshold"]])
    return out


# --- plumbing --------------------------------------------------------------------

COMMANDS = {"classes": (cmd_classes, classes_csv), "series": (cmd_series, series_csv),
            "verify": (cmd_verify, verify_csv)}


def render(report: dict, fmt: str, command: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=1, sort_keys=True, default=str) + "\n"
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(COMMANDS[command][1](report))
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta", type=int, default=-3, help="negative fundamental discriminant (default -3)")
    common.add_argument("--r", type=int, default=1, help="square root of Delta mod 4N (default 1)")
    common.add_argument("--level", type=int, default=1, help="level N (default 1)")
    common.add_argument("--dmax", type=int, default=12, help="largest index d (default 12)")
    common.add_argument("--tol", type=float, default=1e-6, help="target tolerance in [1e-12, 1e-3]")
    common.add_argument("--tau", type=parse_tau, action="append", help="sample point u+vi (repeatable)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=0, help="worker processes (0 = all cores)")
    common.add_argument("--precision", choices=("standard", "high"), default="standard")

    p = argparse.ArgumentParser(prog="windingseries",
                                description="Twisted traces of cycle integrals and their theta lifts.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classes", parents=[common], help="class and genus character table")
    sub.add_parser("series", parents=[common], help="generating series and theta tables")
    v = sub.add_parser("verify", parents=[common], help="run the numerical checks")
    v.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    v.add_argument("--inject-failure", type=int, metavar="N",
                   help="perturb criterion N so the harness must report a failure")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(command=ns.command, Delta=ns.delta, r=ns.r, N=ns.level, d_max=ns.dmax, tol=ns.tol,
                     taus=ns.tau or [1j], output_path=ns.out, format=ns.format, precision_mode=ns.precision,
                     threads=ns.threads, only=getattr(ns, "only", None),
                     inject_failure=getattr(ns, "inject_failure", None))


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as ex:
        return EXIT_USAGE if ex.code else EXIT_OK
    cfg = config_from_args(ns)
    try:
        report = COMMANDS[cfg.command][0](cfg)
    except (UsageError, PreconditionError) as ex:
        print("windingseries: error: %s" % ex, file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ConvergenceError) as ex:
        print("windingseries: precision error: %s" % ex, file=sys.stderr)
        return EXIT_PRECISION
    try:
        _write(render(report, cfg.format, cfg.command), cfg.output_path)
    except OSError as ex:
        print("windingseries: cannot write %s: %s" % (cfg.output_path, ex.strerror), file=sys.stderr)
        return EXIT_FAIL
    if cfg.command == "verify":
        for r in report["results"]:
            print("criterion %2d %s residual=%.3e" % (r["criterion"], "PASS" if r["passed"] else "FAIL",
                                                      r["residual"]), file=sys.stderr)
        return EXIT_OK if report["passed"] else EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
