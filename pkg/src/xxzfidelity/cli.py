"""Command-line front end.

Subcommands: ``eval`` (one anisotropy point), ``scan`` (grid of points),
``fit`` (asymptotic coefficient extraction against the reference
expansions), ``identities`` (all residual suites), ``ed`` (finite-chain
convergence study).  Reports are JSON (default) or CSV, written to stdout
or ``--output``; floats use the shortest round-trip representation, so
identical configurations yield byte-identical reports.

Point rows always carry the same columns:
x, eps, delta, xi, ln_xi, f, ln_f, ratio, path, est_rel_error
(xi is inf once it exceeds the double range; ln_xi is always finite).

Exit codes: 0 success, 1 validation error, 2 numerical failure.  Errors are
reported on stderr as one JSON object {"error": <class>, "message": ...}.
Scans honor a THREADS environment variable (or --threads) for per-point
parallelism; output order is always input order.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

from .ed_oracle import Pinning, convergence_study
from .elliptic import ModelPoint, log_correlation_length, moduli, modulus_k
from .errors import DomainError, InvalidSpec, XXZFidelityError
from .fidelity import (fidelity, fidelity_modular, fidelity_raw,
                       fidelity_simplified, g_decomposition_residual,
                       g_product, ln_g_series, short_theta_identity_residual)
from .qseries import Tolerance, minus_one_peel_residual, verify_qcalc_identities
from .scaling import (CENTRAL_CHARGE, collect_ln_xi, collect_minus_ln_f,
                      fit_asymptote, log_spaced)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

POINT_COLUMNS = ("x", "eps", "delta", "xi", "ln_xi", "f", "ln_f", "ratio",
                 "path", "est_rel_error")

_LN_HUGE = math.log(sys.float_info.max)
_SELF_DUAL_X = math.exp(-math.pi)


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI invocation."""

    command: str
    x: float | None = None
    eps: float | None = None
    grid_var: str = "x"
    grid_min: float | None = None
    grid_max: float | None = None
    count: int = 10
    spacing: str = "linear"
    rel_tol: float = 1e-12
    max_terms: int | None = None
    fmt: str = "json"
    output: str | None = None
    Ls: tuple[int, ...] = ()
    pinning: str = "neel"
    threads: int | None = None

    def __post_init__(self):
        if self.command not in ("eval", "scan", "fit", "identities", "ed"):
            raise InvalidSpec(f"unknown command {self.command!r}")
        if self.fmt not in ("json", "csv"):
            raise InvalidSpec(f"format must be json or csv, got {self.fmt!r}")
        if self.spacing not in ("linear", "log"):
            raise InvalidSpec(f"spacing must be linear or log, got {self.spacing!r}")
        if self.command == "eval":
            if (self.x is None) == (self.eps is None):
                raise InvalidSpec("eval needs exactly one of --x / --eps")
        if self.command in ("scan", "fit"):
            if self.grid_min is None or self.grid_max is None:
                raise InvalidSpec(f"{self.command} needs grid bounds")
            if not (self.grid_min <= self.grid_max):
                raise InvalidSpec("grid min must be <= max")
            if self.count < 1:
                raise InvalidSpec(f"count must be >= 1, got {self.count}")
            if self.grid_var == "x":
                if not (0.0 < self.grid_min and self.grid_max < 1.0):
                    raise InvalidSpec("x grid bounds must lie inside (0,1)")
            elif not (self.grid_min > 0.0):
                raise InvalidSpec("eps grid bounds must be positive")
        if self.command == "fit" and self.count < 3:
            raise InvalidSpec("fit needs count >= 3")
        if self.command == "ed":
            if self.x is None:
                raise InvalidSpec("ed needs --x")
            if self.pinning not in ("neel", "none"):
                raise InvalidSpec(f"pinning must be neel or none, got {self.pinning!r}")

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(rel_tol=self.rel_tol, max_terms=self.max_terms)


def _point_row(p: ModelPoint, tol: Tolerance) -> dict:
    result = fidelity(p, tol)
    ln_xi = log_correlation_length(p, tol)
    xi = math.exp(ln_xi) if ln_xi <= _LN_HUGE else math.inf
    ratio = (-result.ln_f / ln_xi) if ln_xi != 0.0 else math.inf
    return {
        "x": p.x, "eps": p.eps, "delta": p.delta,
        "xi": xi, "ln_xi": ln_xi,
        "f": result.f, "ln_f": result.ln_f,
        "ratio": ratio, "path": result.path.value,
        "est_rel_error": result.est_rel_error,
    }


def _grid(config: RunConfig) -> list[float]:
    lo, hi, count = config.grid_min, config.grid_max, config.count
    if config.spacing == "log":
        return log_spaced(lo, hi, count)
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _map_ordered(fn, items, threads):
    if threads is None:
        env = os.environ.get("THREADS", "")
        threads = int(env) if env.isdigit() else 0
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _run_eval(config: RunConfig):
    p = (ModelPoint.from_x(config.x) if config.x is not None
         else ModelPoint.from_eps(config.eps))
    return _point_row(p, config.tolerance), POINT_COLUMNS


def _run_scan(config: RunConfig):
    tol = config.tolerance

    def row(v: float) -> dict:
        p = ModelPoint.from_x(v) if config.grid_var == "x" else ModelPoint.from_eps(v)
        return _point_row(p, tol)

    return _map_ordered(row, _grid(config), config.threads), POINT_COLUMNS


_FIT_COLUMNS = ("quantity", "A", "B", "C", "max_residual", "sample_count",
                "A_expected", "A_rel_error", "B_expected", "B_abs_error",
                "ln_eps_coeff")


def _run_fit(config: RunConfig):
    tol = config.tolerance
    eps_grid = (_grid(config) if config.spacing == "linear"
                else log_spaced(config.grid_min, config.grid_max, config.count))
    targets = [
        ("minus_ln_f", collect_minus_ln_f(eps_grid, tol),
         math.pi ** 2 / 16.0, -0.25 * math.log(2.0)),
        ("ln_xi", collect_ln_xi(eps_grid, tol),
         math.pi ** 2 / 2.0, -math.log(4.0)),
    ]
    rows = []
    for name, samples, a_ref, b_ref in targets:
        fit = fit_asymptote(samples)
        augmented = fit_asymptote(samples, include_log=True)
        rows.append({
            "quantity": name,
            "A": fit.A, "B": fit.B, "C": fit.C,
            "max_residual": fit.max_residual,
            "sample_count": fit.sample_count,
            "A_expected": a_ref,
            "A_rel_error": abs(fit.A - a_ref) / abs(a_ref),
            "B_expected": b_ref,
            "B_abs_error": abs(fit.B - b_ref),
            "ln_eps_coeff": augmented.ln_coeff,
        })
    return rows, _FIT_COLUMNS


_IDENTITY_COLUMNS = ("check", "max_residual")


def _run_identities(config: RunConfig):
    tol = config.tolerance
    x_grid = (0.1, 0.3, 0.5, 0.7, 0.9)

    r1_max = r2_max = 0.0
    for x in (0.1, 0.5, 0.9):
        for z in (0.6, -0.6):
            for b, c in ((1, 2), (2, 3)):
                r1, r2 = verify_qcalc_identities(x, z, b, c, tol)
                r1_max = max(r1_max, r1)
                r2_max = max(r2_max, r2)

    peel_max = max(minus_one_peel_residual(x ** 4, tol) for x in x_grid)

    theta_max = 0.0
    for b, x in ((4.0, 0.5), (2.0, 0.7), (4.0, _SELF_DUAL_X), (1.0, 0.4), (8.0, 0.6)):
        theta_max = max(theta_max,
                        short_theta_identity_residual(b, ModelPoint.from_x(x), tol))

    three_path_max = 0.0
    for x in (0.3, 0.45, 0.6, 0.75, 0.9):
        p = ModelPoint.from_x(x)
        lns = [fidelity_raw(p, tol).ln_f, fidelity_simplified(p, tol).ln_f,
               fidelity_modular(p, tol).ln_f]
        three_path_max = max(three_path_max,
                             abs(math.expm1(max(lns) - min(lns))))

    complementary_max = max(moduli(z, tol).complementary_residual()
                            for z in (0.05, 0.25, 0.5, 0.7, 0.9))
    duality_max = 0.0
    for x in (0.3, 0.5, 0.7, 0.85, 0.95):
        p = ModelPoint.from_x(x)
        kp = moduli(x, tol).kprime
        duality_max = max(duality_max, abs(modulus_k(p.x_dual, tol) - kp) / kp)

    g_routes_max = 0.0
    g_decomp_max = 0.0
    for x in x_grid:
        p = ModelPoint.from_x(x)
        g_routes_max = max(g_routes_max,
                           abs(math.expm1(ln_g_series(p, tol).ln_g
                                          - g_product(p, tol).ln_g)))
        g_decomp_max = max(g_decomp_max, g_decomposition_residual(p, tol))

    checks = [
        ("qcalc_r1", r1_max),
        ("qcalc_r2", r2_max),
        ("minus_one_peel", peel_max),
        ("short_theta", theta_max),
        ("three_path_fidelity", three_path_max),
        ("moduli_complementary", complementary_max),
        ("moduli_duality", duality_max),
        ("g_series_vs_product", g_routes_max),
        ("g_decomposition", g_decomp_max),
    ]
    return [{"check": name, "max_residual": value} for name, value in checks], \
        _IDENTITY_COLUMNS


_ED_COLUMNS = ("L", "f_finite", "f_exact", "abs_error")


def _run_ed(config: RunConfig):
    pinning = Pinning.NEEL if config.pinning == "neel" else Pinning.NONE
    rows = convergence_study(config.Ls, config.x, pinning)
    f_exact = fidelity(ModelPoint.from_x(config.x), config.tolerance).f
    return [{"L": r.L, "f_finite": r.f_finite, "f_exact": f_exact,
             "abs_error": r.abs_error} for r in rows], _ED_COLUMNS


def _render_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _render(rows, columns, fmt: str) -> str:
    if fmt == "csv":
        return _render_csv(rows if isinstance(rows, list) else [rows], columns)
    return json.dumps(rows, indent=2) + "\n"


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    runners = {
        "eval": _run_eval,
        "scan": _run_scan,
        "fit": _run_fit,
        "identities": _run_identities,
        "ed": _run_ed,
    }
    try:
        rows, columns = runners[config.command](config)
        text = _render(rows, columns, config.fmt)
    except (InvalidSpec, DomainError) as exc:
        _emit_error(exc)
        return EXIT_VALIDATION
    except XXZFidelityError as exc:
        _emit_error(exc)
        return EXIT_NUMERICAL
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _emit_error(exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                 "message": str(exc)}) + "\n")


class _Parser(argparse.ArgumentParser):
    """argparse front end that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_common(sub):
    sub.add_argument("--rel-tol", type=float, default=1e-12,
                     help="relative tolerance of every truncated evaluation")
    sub.add_argument("--max-terms", type=int, default=None,
                     help="override the per-strategy term caps")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", default=None, help="file path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xxzfid",
                     description="Bipartite fidelity and correlation length "
                                 "of the infinite antiferromagnetic XXZ chain")
    commands = parser.add_subparsers(dest="command", required=True)

    p_eval = commands.add_parser("eval", help="evaluate one anisotropy point")
    p_eval.add_argument("--x", type=float, default=None)
    p_eval.add_argument("--eps", type=float, default=None)
    _add_common(p_eval)

    p_scan = commands.add_parser("scan", help="evaluate a grid of points")
    p_scan.add_argument("--var", choices=("x", "eps"), default="x")
    p_scan.add_argument("--min", type=float, required=True)
    p_scan.add_argument("--max", type=float, required=True)
    p_scan.add_argument("--count", type=int, default=10)
    p_scan.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p_scan.add_argument("--threads", type=int, default=None,
                        help="parallel points (default: THREADS env or serial)")
    _add_common(p_scan)

    p_fit = commands.add_parser("fit", help="asymptotic coefficient extraction")
    p_fit.add_argument("--eps-min", type=float, required=True)
    p_fit.add_argument("--eps-max", type=float, required=True)
    p_fit.add_argument("--count", type=int, default=10)
    p_fit.add_argument("--spacing", choices=("linear", "log"), default="log")
    _add_common(p_fit)

    p_id = commands.add_parser("identities", help="run all residual suites")
    _add_common(p_id)

    p_ed = commands.add_parser("ed", help="finite-chain convergence study")
    p_ed.add_argument("--x", type=float, required=True)
    p_ed.add_argument("--Ls", type=lambda s: tuple(int(t) for t in s.split(",")),
                      default=(8, 12), help="comma-separated even lengths")
    p_ed.add_argument("--pinning", choices=("neel", "none"), default="neel")
    _add_common(p_ed)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    common = dict(rel_tol=args.rel_tol, max_terms=args.max_terms,
                  fmt=args.format, output=args.output)
    if args.command == "eval":
        return RunConfig(command="eval", x=args.x, eps=args.eps, **common)
    if args.command == "scan":
        return RunConfig(command="scan", grid_var=args.var, grid_min=args.min,
                         grid_max=args.max, count=args.count,
                         spacing=args.spacing, threads=args.threads, **common)
    if args.command == "fit":
        return RunConfig(command="fit", grid_var="eps", grid_min=args.eps_min,
                         grid_max=args.eps_max, count=args.count,
                         spacing=args.spacing, **common)
    if args.command == "identities":
        return RunConfig(command="identities", **common)
    return RunConfig(command="ed", x=args.x, Ls=args.Ls, pinning=args.pinning,
                     **common)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        config = _config_from_args(args)
    except (InvalidSpec, DomainError) as exc:
        _emit_error(exc)
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
