"""Command-line front end.

All emitted numbers are in reduced units hbar = m = L = 1, so ``B`` equals
the uncertainty product ``BL/hbar``. ``--bl`` is given in units of
``2 pi hbar``; ``--bl optimal`` selects the product maximizing the envelope
defect bound.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .audit import AuditPolicy, evaluate
from .core import ConfigurationError
from .propagator import ConvergenceError, Grid, discretize, free_propagate
from .states import (
    OverlapRangeError,
    StateSpec,
    envelope_density,
    invert_overlap,
    optimal_overlap,
    pattern_density,
    required_pm,
)
from .sweep import rows_to_csv, sweep
from .verification import Verifier

log = logging.getLogger("propagation_paradox")

EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_CHECK_FAILED = 1

SCALE_CONVENTION = {
    "hbar": 1.0,
    "mass": 1.0,
    "L": 1.0,
    "note": "reduced units; B equals BL/hbar and x is in units of L",
}
FIGURE_COLUMNS = ("x_over_L", "density_times_L", "analytic_density_times_L", "envelope_times_L", "rect_times_L")


@dataclass
class RunConfig:
    bl_over_2pi_hbar: object = 0.024  # float, or "optimal"
    grid_n: int = 2**18
    x_extent_over_L: float = 400.0
    convergence_tol: float = 1e-5
    truncation_threshold: float = 1e-4
    max_grid_n: int = 2**24
    out: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.bl_over_2pi_hbar, str) and self.bl_over_2pi_hbar != "optimal":
            try:
                self.bl_over_2pi_hbar = float(self.bl_over_2pi_hbar)
            except ValueError:
                raise ConfigurationError(f"--bl must be a number or 'optimal', got {self.bl_over_2pi_hbar!r}")
        if self.bl_over_2pi_hbar != "optimal" and not self.bl_over_2pi_hbar > 0:
            raise ConfigurationError("--bl must be positive")
        self.policy()  # validates the numeric settings

    @property
    def BL(self) -> float:
        if self.bl_over_2pi_hbar == "optimal":
            return invert_overlap(optimal_overlap())
        return 2.0 * math.pi * float(self.bl_over_2pi_hbar)

    def policy(self, **overrides) -> AuditPolicy:
        kw = dict(
            grid_n=self.grid_n,
            x_extent_over_L=self.x_extent_over_L,
            convergence_tol=self.convergence_tol,
            truncation_threshold=self.truncation_threshold,
            max_grid_n=self.max_grid_n,
        )
        kw.update(overrides)
        return AuditPolicy(**kw)


_FLAG_TO_FIELD = {
    "bl": "bl_over_2pi_hbar",
    "grid_n": "grid_n",
    "x_extent": "x_extent_over_L",
    "convergence_tol": "convergence_tol",
    "truncation_threshold": "truncation_threshold",
    "max_grid_n": "max_grid_n",
    "out": "out",
}


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for flag, name in _FLAG_TO_FIELD.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


def run_report(cfg: RunConfig) -> dict:
    report = evaluate(cfg.BL, cfg.policy()).to_dict()
    diagnostics = report.pop("diagnostics")
    return {
        "config": asdict(cfg),
        "scale_convention": SCALE_CONVENTION,
        "results": report,
        "diagnostics": diagnostics,
    }


def figure_rows(cfg: RunConfig, x_max: float = 12.0):
    """Density at the matching time on |x/L| <= x_max, with the analytic overlays."""
    BL = cfg.BL
    B = BL
    report = evaluate(BL, cfg.policy(farfield_factor=0.0))
    g = report.diagnostics["grid"]
    grid = Grid(g["n"], g["half_extent"]).refined()
    psi = free_propagate(discretize(StateSpec.superposition(1.0, B), grid, None), 1.0 / B)
    x = grid.x
    w = np.abs(x) <= x_max
    x = x[w]
    s = report.s
    dens = psi.density()[w]
    rect = np.where(np.abs(x) <= 1.0, 0.5 * required_pm(s), 0.0)
    return list(zip(x, dens, pattern_density(x, s, B), envelope_density(x, s, B), rect))


def cmd_run(args) -> int:
    cfg = load_config(args)
    text = json.dumps(run_report(cfg), indent=2, allow_nan=False) + "\n"
    _emit(text, cfg.out)
    return 0


def cmd_figure(args) -> int:
    cfg = load_config(args)
    _emit(_csv(FIGURE_COLUMNS, figure_rows(cfg)), cfg.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    rows = sweep(args.u_min, args.u_max, args.steps, "full" if args.full else "analytic", cfg.policy())
    _emit(rows_to_csv(rows), cfg.out)
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args)
    results = Verifier(cfg.policy()).run_all()
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0 if passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--bl", help="uncertainty product BL in units of 2*pi*hbar, or 'optimal' (default 0.024)")
    common.add_argument("--grid-n", type=int, help="minimum grid size, power of two (default 2^18)")
    common.add_argument("--x-extent", type=float, help="minimum window half-extent in units of L (default 400)")
    common.add_argument("--convergence-tol", type=float, help="convergence tolerance on P(M) (default 1e-5)")
    common.add_argument("--truncation-threshold", type=float, help="max probability outside the window (default 1e-4)")
    common.add_argument("--max-grid-n", type=int, help="largest grid the refinement may use (default 2^24)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="propagation-paradox", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="audit one state, JSON report").set_defaults(func=cmd_run)
    sub.add_parser("figure", parents=[common], help="density at t_M as CSV").set_defaults(func=cmd_figure)
    sw = sub.add_parser("sweep", parents=[common], help="defect versus BL/(4 hbar) as CSV")
    sw.add_argument("--u-min", type=float, default=0.005)
    sw.add_argument("--u-max", type=float, default=0.2)
    sw.add_argument("--steps", type=int, default=40)
    sw.add_argument("--full", action="store_true", help="also run the numeric audit per row")
    sw.set_defaults(func=cmd_sweep)
    sub.add_parser("verify", parents=[common], help="acceptance checks").set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep" and args.steps < 2:
        parser.error("--steps must be at least 2")
    try:
        return args.func(args)
    except (ConfigurationError, OverlapRangeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
