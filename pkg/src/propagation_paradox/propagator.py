"""Uniform-grid wavefunctions and exact free evolution in the Fourier basis.

The position lattice is cell-centred: nodes sit at ``-X + (k + 1/2) dx`` so
that cell boundaries fall on integer multiples of ``dx``. A slit whose
half-width is a multiple of ``dx`` then has its edges on cell boundaries and
is represented without edge samples. The momentum lattice is
``p_j = (j - n/2) dp`` with ``dp = pi hbar / X``, so ``p = 0`` is a node.

Continuous-transform convention::

    phi(p) = (2 pi hbar)^(-1/2) int psi(x) exp(-i p x / hbar) dx
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.fft as sfft

from .core import NATURAL, ConfigurationError, Interval, PhysicalScale
from .states import StateSpec

log = logging.getLogger(__name__)

MIN_GRID_N = 2**10
RESOLUTION = 64  # samples per slit width, in position and in momentum


class ConvergenceError(RuntimeError):
    """Refinement did not reach the tolerance; ``history`` holds every level."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    n: int
    half_extent: float
    hbar: float = 1.0

    def __post_init__(self):
        if not is_power_of_two(self.n) or self.n < MIN_GRID_N:
            raise ConfigurationError(
                f"grid size must be a power of two >= {MIN_GRID_N}, got {self.n}"
            )
        if not self.half_extent > 0:
            raise ConfigurationError(f"half_extent must be positive, got {self.half_extent}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / self.n

    @property
    def dp(self) -> float:
        return math.pi * self.hbar / self.half_extent

    @property
    def x0(self) -> float:
        return -self.half_extent + 0.5 * self.dx

    @property
    def p0(self) -> float:
        return -0.5 * self.n * self.dp

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def p(self) -> np.ndarray:
        return self.p0 + self.dp * np.arange(self.n)

    def extended(self) -> "Grid":
        """Twice the window at the same spacing."""
        return Grid(2 * self.n, 2.0 * self.half_extent, self.hbar)

    def refined(self) -> "Grid":
        """Same window at half the spacing."""
        return Grid(2 * self.n, self.half_extent, self.hbar)


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    grid: Grid
    amplitudes: np.ndarray
    truncated_mass: float = 0.0
    time_tag: float = 0.0

    def __post_init__(self):
        if self.amplitudes.shape != (self.grid.n,):
            raise ConfigurationError(
                f"expected {self.grid.n} amplitudes, got shape {self.amplitudes.shape}"
            )
        self.amplitudes.flags.writeable = False

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def probability(self, interval: Interval) -> float:
        return interval_probability(self.amplitudes, self.grid.dx, interval, self.grid.x0)

    def momentum_probability(self, interval: Interval) -> float:
        return interval_probability(to_momentum(self), self.grid.dp, interval, self.grid.p0)

    def amplitude_at(self, x: float) -> complex:
        """Band-limited (spectral) interpolation of the amplitude at any ``x``."""
        phi = to_momentum(self)
        g = self.grid
        # exp(i p_j x / hbar) with p_j = p0 + j dp, kept to small arguments
        phase = np.exp(1j * (g.dp * x / g.hbar) * np.arange(g.n))
        s = np.dot(phi, phase) * np.exp(1j * g.p0 * x / g.hbar)
        return complex(s * g.dp / math.sqrt(2.0 * math.pi * g.hbar))


def discretize(
    spec: StateSpec, grid: Grid, truncation_threshold: Optional[float] = 1e-4
) -> SampledWavefunction:
    """Sample ``spec`` on ``grid`` and renormalize on the grid.

    Raises ``ConfigurationError`` when the grid does not resolve the slit
    widths or when the analytic mass outside the window exceeds
    ``truncation_threshold``.
    """
    if grid.hbar != spec.scale.hbar:
        raise ConfigurationError(f"grid hbar {grid.hbar} != state hbar {spec.scale.hbar}")
    if spec.L is not None and grid.dx > spec.L / RESOLUTION * (1 + 1e-12):
        raise ConfigurationError(
            f"dx <= L/{RESOLUTION} violated: dx={grid.dx:.6g}, L/{RESOLUTION}={spec.L / RESOLUTION:.6g}"
        )
    if spec.B is not None and grid.dp > spec.B / RESOLUTION * (1 + 1e-12):
        raise ConfigurationError(
            f"dp <= B/{RESOLUTION} violated: dp={grid.dp:.6g}, B/{RESOLUTION}={spec.B / RESOLUTION:.6g}"
        )
    tm = spec.truncated_mass(grid.half_extent)
    if truncation_threshold is not None and tm > truncation_threshold:
        raise ConfigurationError(
            f"truncated mass {tm:.3g} exceeds threshold {truncation_threshold:.3g} "
            f"at half-extent {grid.half_extent:g}; enlarge the window"
        )
    amp = spec.position_amplitude(grid.x)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * grid.dx)
    return SampledWavefunction(grid, amp, tm, 0.0)


def _alternate(a: np.ndarray) -> np.ndarray:
    a[1::2] *= -1.0
    return a


def to_momentum(psi: SampledWavefunction) -> np.ndarray:
    """Momentum amplitudes on ``psi.grid.p``; unitary with respect to ``dx``/``dp`` weights."""
    g = psi.grid
    n = g.n
    phi = sfft.fft(_alternate(np.array(psi.amplitudes, dtype=complex)), overwrite_x=True)
    # exp(-i p_j x0 / hbar) = (-1)^j exp(-i pi (j - n/2) / n) for n divisible by 4
    phi *= np.exp(-1j * math.pi / n * (np.arange(n) - n // 2))
    _alternate(phi)
    phi *= g.dx / math.sqrt(2.0 * math.pi * g.hbar)
    return phi


def from_momentum(phi: np.ndarray, grid: Grid, time_tag: float = 0.0) -> SampledWavefunction:
    """Inverse of ``to_momentum``."""
    n = grid.n
    a = _alternate(np.array(phi, dtype=complex))
    a *= np.exp(1j * math.pi / n * (np.arange(n) - n // 2))
    psi = _alternate(sfft.ifft(a, overwrite_x=True))
    psi *= math.sqrt(2.0 * math.pi * grid.hbar) / grid.dx
    return SampledWavefunction(grid, psi, 0.0, time_tag)


def free_propagate(
    psi: SampledWavefunction, t: float, scale: PhysicalScale = NATURAL
) -> SampledWavefunction:
    """Apply ``exp(-i p^2 t / (2 m hbar))`` in momentum space."""
    g = psi.grid
    if g.hbar != scale.hbar:
        raise ConfigurationError(f"grid hbar {g.hbar} != scale hbar {scale.hbar}")
    # the momentum-lattice phase factors cancel between forward and inverse
    # transforms, leaving only the (-1)^k shift that centres p = 0
    a = sfft.fft(_alternate(np.array(psi.amplitudes, dtype=complex)), overwrite_x=True)
    p = g.p
    a *= np.exp((-0.5j * t / (scale.mass * scale.hbar)) * (p * p))
    del p
    out = _alternate(sfft.ifft(a, overwrite_x=True))
    return SampledWavefunction(g, out, psi.truncated_mass, psi.time_tag + t)


def interval_probability(amplitudes, spacing: float, interval: Interval, origin: float) -> float:
    """Probability in ``interval`` from samples at ``origin + k * spacing``.

    Each sample stands for the cell ``[x_k - h/2, x_k + h/2]``; boundary
    cells contribute the covered fraction of their mass.
    """
    n = len(amplitudes)
    h = spacing
    win_lo = origin - 0.5 * h
    win_hi = origin + (n - 0.5) * h
    if interval.lo < win_lo - 1e-12 * h or interval.hi > win_hi + 1e-12 * h:
        raise ConfigurationError(
            f"interval [{interval.lo:g}, {interval.hi:g}] outside window [{win_lo:g}, {win_hi:g}]"
        )
    k_lo = max(int(math.floor((interval.lo - win_lo) / h)), 0)
    k_hi = min(int(math.ceil((interval.hi - win_lo) / h)), n)
    k = np.arange(k_lo, k_hi)
    xk = origin + k * h
    w = np.clip(np.minimum(xk + 0.5 * h, interval.hi) - np.maximum(xk - 0.5 * h, interval.lo), 0.0, h)
    amps = np.asarray(amplitudes[k_lo:k_hi])
    return float(np.sum((amps.real**2 + amps.imag**2) * w))


# --- convergence -------------------------------------------------------------


@dataclass(frozen=True)
class ConvergencePolicy:
    """Grid refinement schedule.

    Level 0 uses ``grid``; later levels alternately double the window at
    fixed spacing (odd levels) and halve the spacing (even levels), so the
    first comparison probes truncation and the second discretization.
    """

    grid: Grid
    tol: float = 1e-5
    max_levels: int = 4
    max_n: int = 2**24

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tol}")
        if self.max_levels < 1:
            raise ConfigurationError("max_levels must be >= 1")

    def level_grid(self, level: int) -> Grid:
        g = self.grid
        for k in range(1, level + 1):
            g = g.extended() if k % 2 else g.refined()
        return g


@dataclass
class ConvergenceResult:
    value: object
    error: float
    grid: Grid
    level: int
    history: list = field(default_factory=list)
    component_deltas: Optional[np.ndarray] = None


def converge(
    run: Callable[[Grid], object],
    policy: ConvergencePolicy,
    monitor: Optional[Callable[[object], object]] = None,
) -> ConvergenceResult:
    """Re-run ``run`` on successively larger grids until the monitored value settles.

    ``run`` may return a scalar or an array. Convergence is judged on
    ``monitor(value)`` (default: the whole value, max-norm); the full
    component-wise change of the last step is kept in ``component_deltas``.
    """
    monitor = monitor or (lambda v: v)
    history = []
    prev = None
    for level in range(policy.max_levels + 1):
        grid = policy.level_grid(level)
        if grid.n > policy.max_n:
            break
        value = run(grid)
        entry = {"level": level, "n": grid.n, "half_extent": grid.half_extent, "value": value}
        if prev is not None:
            delta = float(np.max(np.abs(np.asarray(monitor(value)) - np.asarray(monitor(prev)))))
            entry["delta"] = delta
            history.append(entry)
            log.debug("converge level %d n=%d X=%g delta=%.3g", level, grid.n, grid.half_extent, delta)
            if delta < policy.tol:
                comp = np.abs(np.asarray(value, dtype=float) - np.asarray(prev, dtype=float))
                return ConvergenceResult(value, delta, grid, level, history, comp)
        else:
            history.append(entry)
        prev = value
    raise ConvergenceError(
        f"no convergence to tol={policy.tol:g} within {policy.max_levels} levels "
        f"(max n {policy.max_n}); last deltas: "
        + ", ".join(f"{h['delta']:.3g}" for h in history if "delta" in h),
        history,
    )
