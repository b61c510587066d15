"""Defect probability as a function of the uncertainty product, and its maximum."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .audit import AuditPolicy, evaluate
from .core import NATURAL, ConfigurationError, PhysicalScale
from .states import U_MONOTONE, defect_lower_bound, optimal_overlap, overlap_from_u

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
SWEEP_COLUMNS = ("u", "s", "analytic_bound", "numeric_defect", "numeric_PM")


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass
class SweepRow:
    u: float
    s: float
    analytic_bound: float
    numeric_defect: Optional[float] = None
    numeric_PM: Optional[float] = None


def sweep(
    u_min: float,
    u_max: float,
    steps: int,
    mode: str = "analytic",
    policy: AuditPolicy | None = None,
    scale: PhysicalScale = NATURAL,
) -> list[SweepRow]:
    """Rows on an evenly spaced lattice of ``u = BL/(4 hbar)``.

    ``mode="full"`` also runs a numeric audit for each row.
    """
    if not (0.0 < u_min < u_max <= U_MONOTONE):
        raise ConfigurationError(f"need 0 < u_min < u_max <= {U_MONOTONE}, got [{u_min}, {u_max}]")
    if steps < 2:
        raise ConfigurationError(f"steps must be >= 2, got {steps}")
    if mode not in ("analytic", "full"):
        raise ConfigurationError(f"unknown sweep mode {mode!r}")
    rows = []
    for u in np.linspace(u_min, u_max, steps):
        u = float(u)
        s = overlap_from_u(u)
        row = SweepRow(u, s, defect_lower_bound(s))
        if mode == "full":
            report = evaluate(4.0 * scale.hbar * u, policy, scale)
            row.numeric_defect = report.defect
            row.numeric_PM = report.P_M
        rows.append(row)
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else repr(float(v))) for k, v in asdict(r).items()})
    return buf.getvalue()


def maximize_bound(bracket: tuple[float, float] = (0.0, 0.5), tol: float = 1e-10):
    """Maximize the envelope defect bound over the overlap ``s``.

    The golden-section result is checked against the closed-form stationary
    point; returns ``(s*, bound(s*))``.
    """
    s_star, best = golden_section_max(defect_lower_bound, *bracket, tol=tol)
    exact = optimal_overlap()
    if abs(s_star - exact) > 1e-8:
        raise ArithmeticError(f"golden section found s={s_star!r}, closed form gives {exact!r}")
    return s_star, best


def maximize_numeric(
    policy: AuditPolicy | None = None,
    bracket: tuple[float, float] = (0.08, 0.30),
    coarse_steps: int = 6,
    tol: float = 2e-3,
    scale: PhysicalScale = NATURAL,
):
    """Maximize the audited defect over ``BL`` (absolute units).

    A coarse lattice picks the best cell, then golden-section search refines
    it to ``tol`` in ``BL``. Returns ``(BL*, defect*, report*)``.
    """
    lo, hi = bracket
    if not (0.0 < lo < hi <= 4.0 * scale.hbar * U_MONOTONE):
        raise ConfigurationError(f"bracket {bracket} outside the monotone overlap range")
    cache = {}

    def defect(bl: float) -> float:
        if bl not in cache:
            cache[bl] = evaluate(bl, policy, scale)
            log.info("numeric defect at BL=%.6g: %.6f", bl, cache[bl].defect)
        return cache[bl].defect

    grid = np.linspace(lo, hi, coarse_steps)
    values = [defect(float(b)) for b in grid]
    k = int(np.argmax(values))
    a = float(grid[max(k - 1, 0)])
    b = float(grid[min(k + 1, coarse_steps - 1)])
    bl, best = golden_section_max(defect, a, b, tol=tol)
    return bl, best, cache[bl]
