"""Measure P(L), P(B), P(M) for a slit superposition and test the propagation inequality.

``P(L)`` is the position probability in the slit window at ``t = 0``,
``P(B)`` the momentum probability in the momentum window, and ``P(M)`` the
position probability at the matching time ``t_M = mL/B`` in the window that
straight-line trajectories from ``L`` with momenta in ``B`` must occupy.
Straight-line motion requires ``P(M) >= P(L) + P(B) - 1``.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NATURAL,
    ConfigurationError,
    Interval,
    PhysicalScale,
    classical_bound_interval,
    matching_time,
)
from .propagator import (
    MIN_GRID_N,
    RESOLUTION,
    ConvergencePolicy,
    Grid,
    converge,
    discretize,
    free_propagate,
    is_power_of_two,
)
from .states import StateSpec, defect_lower_bound, envelope_pm_bound, marginal_probabilities, overlap

log = logging.getLogger(__name__)

SATISFIED = "satisfied"
VIOLATED = "violated"
_PROB_SLACK = 1e-9


@dataclass(frozen=True)
class AuditPolicy:
    """Grid and convergence settings for an audit.

    ``grid_n`` and ``x_extent_over_L`` are lower bounds: the window is
    widened (by doubling ``n`` at fixed spacing ``L / points_per_L``) until
    the momentum lattice resolves ``B`` and the truncated mass is below
    ``truncation_threshold``.
    """

    grid_n: int = 2**18
    x_extent_over_L: float = 400.0
    truncation_threshold: float = 1e-4
    convergence_tol: float = 1e-5
    max_levels: int = 4
    max_grid_n: int = 2**24
    points_per_L: int = RESOLUTION
    farfield_factor: float = 100.0

    def __post_init__(self):
        if not is_power_of_two(self.grid_n) or self.grid_n < MIN_GRID_N:
            raise ConfigurationError(
                f"grid_n must be a power of two >= {MIN_GRID_N}, got {self.grid_n}"
            )
        for name in ("x_extent_over_L", "truncation_threshold", "convergence_tol"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not is_power_of_two(self.points_per_L) or self.points_per_L < RESOLUTION:
            raise ConfigurationError(f"points_per_L must be a power of two >= {RESOLUTION}")


def initial_grid(spec: StateSpec, L: float, B: float, policy: AuditPolicy, reach: float = 0.0) -> Grid:
    """Smallest admissible level-0 grid for auditing ``spec``.

    ``reach`` is the largest ``|x|`` any measured interval extends to.
    """
    hbar = spec.scale.hbar
    dx = L / policy.points_per_L
    need = max(policy.x_extent_over_L * L, RESOLUTION * math.pi * hbar / B, reach)
    n = policy.grid_n
    while True:
        X = 0.5 * n * dx
        if X >= need and spec.truncated_mass(X) <= policy.truncation_threshold:
            break
        n *= 2
        if n > policy.max_grid_n:
            raise ConfigurationError(
                f"audit needs a grid larger than max_grid_n={policy.max_grid_n} "
                f"(B={B:.4g}, L={L:.4g}); raise truncation_threshold or max_grid_n"
            )
    return Grid(n, X, hbar)


def frechet_lower_bound(P_L: float, P_B: float) -> float:
    """Least joint probability ``P(L and B)`` compatible with the two marginals."""
    for name, p in (("P_L", P_L), ("P_B", P_B)):
        if not (-_PROB_SLACK <= p <= 1.0 + _PROB_SLACK):
            raise ValueError(f"{name}={p} is not a probability")
    return max(0.0, P_L + P_B - 1.0)


def check_inequality(P_L: float, P_B: float, P_M: float, margin: float = 0.0) -> str:
    """``violated`` only if ``P_M`` falls short of the bound by more than ``margin``."""
    bound = frechet_lower_bound(P_L, P_B)
    return VIOLATED if P_M < bound - margin else SATISFIED


@dataclass
class AuditReport:
    s: float
    BL_over_2pi_hbar: float
    P_L: float
    P_B: float
    P_M: float
    analytic_P_L_B: float
    bound: float
    required_PM_analytic: float
    defect: float
    envelope_PM_bound: float
    verdict: str
    margin: float
    diagnostics: dict = field(default_factory=dict)

    def check(self) -> str:
        return check_inequality(self.P_L, self.P_B, self.P_M, self.margin)

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def evaluate(
    BL: float,
    policy: AuditPolicy | None = None,
    scale: PhysicalScale = NATURAL,
    L: float = 1.0,
    kind: str = "equal_superposition",
) -> AuditReport:
    """Audit the state ``kind`` built from slits ``L`` and ``B = BL / L``.

    ``kind="position_slit"`` audits the bare slit state against the same
    windows, a classical sanity case.
    """
    policy = policy or AuditPolicy()
    B = BL / L
    hbar = scale.hbar
    if kind == "equal_superposition":
        spec = StateSpec.superposition(L, B, scale)
    elif kind == "position_slit":
        spec = StateSpec.position_slit(L, scale)
    elif kind == "momentum_slit":
        spec = StateSpec.momentum_slit(B, scale)
    else:
        raise ConfigurationError(f"unknown state kind {kind!r}")
    s = overlap(L, B, hbar)

    L_int = Interval.centered(L)
    B_int = Interval.centered(B)
    t_M = matching_time(L, B, scale)
    M_int = classical_bound_interval(L_int, B_int, t_M, scale)

    t_far = policy.farfield_factor * t_M if policy.farfield_factor else None
    far_int = Interval(B_int.center * t_far / scale.mass, B_int.width * t_far / scale.mass) if t_far else None
    reach = max(abs(M_int.lo), abs(M_int.hi))
    if far_int is not None:
        reach = max(reach, abs(far_int.lo), abs(far_int.hi))
    grid0 = initial_grid(spec, L, B, policy, reach)

    def run(grid: Grid) -> np.ndarray:
        psi = discretize(spec, grid, policy.truncation_threshold)
        P_L = psi.probability(L_int)
        P_B = psi.momentum_probability(B_int)
        P_M = free_propagate(psi, t_M, scale).probability(M_int)
        return np.array([P_L, P_B, P_M])

    conv_policy = ConvergencePolicy(
        grid0, tol=policy.convergence_tol, max_levels=policy.max_levels, max_n=policy.max_grid_n
    )
    res = converge(run, conv_policy, monitor=lambda v: v[2])
    P_L, P_B, P_M = (float(v) for v in res.value)
    final = res.grid

    truncated = spec.truncated_mass(final.half_extent)
    comp = {k: float(v) for k, v in zip(("P_L", "P_B", "P_M"), res.component_deltas)}
    margin = max(comp.values()) + truncated

    diagnostics = {
        "truncated_mass": truncated,
        "t_match": t_M,
        "M_interval": [M_int.center, M_int.width],
        "convergence": {
            "tol": policy.convergence_tol,
            "monitored": "P_M",
            "error_estimate": res.error,
            "component_deltas": comp,
            "levels": [
                {"n": h["n"], "half_extent": h["half_extent"],
                 "P_L": float(h["value"][0]), "P_B": float(h["value"][1]), "P_M": float(h["value"][2]),
                 **({"delta": h["delta"]} if "delta" in h else {})}
                for h in res.history
            ],
        },
        "grid": {"n": final.n, "half_extent": final.half_extent, "dx": final.dx, "dp": final.dp},
        "analytic_defect_bound": defect_lower_bound(s),
        "margin_policy": "max component delta of last refinement step + truncated mass",
    }
    if t_far is not None:
        psi0 = discretize(spec, final, policy.truncation_threshold)
        proxy = free_propagate(psi0, t_far, scale).probability(far_int)
        diagnostics["farfield"] = {
            "t": t_far,
            "interval_width": far_int.width,
            "P_B_position_proxy": proxy,
            "difference": proxy - P_B,
        }

    bound = frechet_lower_bound(P_L, P_B)
    report = AuditReport(
        s=s,
        BL_over_2pi_hbar=BL / (2.0 * math.pi * hbar),
        P_L=P_L,
        P_B=P_B,
        P_M=P_M,
        analytic_P_L_B=marginal_probabilities(s)[0],
        bound=bound,
        required_PM_analytic=s,
        defect=P_L + P_B - 1.0 - P_M,
        envelope_PM_bound=envelope_pm_bound(s),
        verdict=check_inequality(P_L, P_B, P_M, margin),
        margin=margin,
        diagnostics=diagnostics,
    )
    log.info("audit BL/2pi hbar=%.5g: P_L=%.6f P_B=%.6f P_M=%.6f defect=%.6f %s",
             report.BL_over_2pi_hbar, P_L, P_B, P_M, report.defect, report.verdict)
    return report
