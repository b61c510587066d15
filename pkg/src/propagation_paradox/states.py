"""Closed-form slit states, their overlap, and the interference pattern at the matching time.

Conventions: ``|L>`` is a rectangular position slit of width ``L`` centred on
``x = 0``; ``|B>`` is a rectangular momentum slit of width ``B`` centred on
``p = 0``. Their overlap ``s = <L|B>`` depends on ``u = BL/(4 hbar)`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import NATURAL, ConfigurationError, PhysicalScale, timescales
from .specfun import si, sinc

# invert_overlap is restricted to u in (0, U_MONOTONE], where s(u) is increasing
U_MONOTONE = 1.0


class OverlapRangeError(ValueError):
    """Requested overlap lies outside the invertible range."""


def overlap_from_u(u: float) -> float:
    """``s = sqrt(2/(pi u)) Si(u)`` with ``u = BL/(4 hbar)``."""
    if not u > 0:
        raise ConfigurationError(f"u must be positive, got {u}")
    return math.sqrt(2.0 / (math.pi * u)) * si(u)


S_MONOTONE_MAX = overlap_from_u(U_MONOTONE)


def overlap(L: float, B: float, hbar: float = 1.0) -> float:
    """Inner product of the position-slit and momentum-slit states."""
    if not (L > 0 and B > 0):
        raise ConfigurationError(f"widths must be positive, got L={L}, B={B}")
    return overlap_from_u(B * L / (4.0 * hbar))


def invert_overlap(s_target: float, hbar: float = 1.0) -> float:
    """Return the product ``BL`` whose overlap equals ``s_target``."""
    if not (0.0 < s_target <= S_MONOTONE_MAX):
        raise OverlapRangeError(
            f"overlap {s_target!r} outside the monotone range (0, {S_MONOTONE_MAX:.6f}]"
        )
    # Si(u) <= u gives s(u) <= sqrt(2u/pi), so u >= pi s^2 / 2
    lo = 0.5 * math.pi * s_target**2
    if lo >= U_MONOTONE:
        return 4.0 * hbar * U_MONOTONE
    f = lambda u: overlap_from_u(u) - s_target
    if f(lo) >= 0.0:
        u = lo
    else:
        u = brentq(f, lo, U_MONOTONE, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return 4.0 * hbar * u


def superposition_coefficient(s: float) -> float:
    """Normalization ``N`` of ``N(|L> + |B>)``."""
    return 1.0 / math.sqrt(2.0 * (1.0 + s))


def marginal_probabilities(s: float) -> tuple[float, float]:
    """``(P(L), P(B)) = ((1+s)/2, (1+s)/2)`` for the equal superposition.

    This neglects the difference between ``int_L |<x|B>|^2 dx`` and ``s^2``;
    the numeric audit measures the exact values.
    """
    p = 0.5 * (1.0 + s)
    return p, p


def required_pm(s: float) -> float:
    """Smallest ``P(M)`` compatible with straight-line motion, ``P(L)+P(B)-1 = s``."""
    return s


def envelope_pm_bound(s: float) -> float:
    """Envelope maximum times the width ``M = 2L``: an upper estimate of ``P(M)``."""
    return 4.0 * s * s / (1.0 + s)


def defect_lower_bound(s: float) -> float:
    return s - envelope_pm_bound(s)


def optimal_overlap() -> float:
    """Stationary point of ``defect_lower_bound``: positive root of ``3s^2 + 6s - 1``."""
    # numerically stable form of (-6 + sqrt(48)) / 6
    return 2.0 / (6.0 + math.sqrt(48.0))


# --- wavefunctions ---------------------------------------------------------


def psi_L_position(x, L: float):
    x = np.asarray(x, dtype=float)
    out = np.where(np.abs(x) <= 0.5 * L, 1.0 / math.sqrt(L), 0.0)
    return out if out.ndim else float(out)


def psi_B_position(x, B: float, hbar: float = 1.0):
    x = np.asarray(x, dtype=float)
    return math.sqrt(B / (2.0 * math.pi * hbar)) * sinc(B * x / (2.0 * hbar))


def psi_B_momentum(p, B: float):
    p = np.asarray(p, dtype=float)
    out = np.where(np.abs(p) <= 0.5 * B, 1.0 / math.sqrt(B), 0.0)
    return out if out.ndim else float(out)


def psi_L_momentum(p, L: float, hbar: float = 1.0):
    p = np.asarray(p, dtype=float)
    return math.sqrt(L / (2.0 * math.pi * hbar)) * sinc(L * p / (2.0 * hbar))


def psi_L_farfield(x, t: float, L: float, scale: PhysicalScale = NATURAL):
    """Fraunhofer form of the evolved position slit, including its chirp phase.

    Only valid once the slit has spread, ``t > m L^2 / (2 pi hbar)``.
    """
    m, hbar = scale.mass, scale.hbar
    t_ff = m * L * L / (2.0 * math.pi * hbar)
    if not t > t_ff:
        raise ConfigurationError(
            f"t={t} is inside the near-field window t <= {t_ff}; propagate numerically"
        )
    x = np.asarray(x, dtype=float)
    amp = math.sqrt(m * L / (2.0 * math.pi * hbar * t)) * sinc(m * L * x / (2.0 * hbar * t))
    phase = m * x * x / (2.0 * hbar * t) - 0.25 * math.pi
    return amp * np.exp(1j * phase)


def _pattern_prefactor(s: float, B: float, hbar: float) -> tuple[float, float]:
    L = invert_overlap(s, hbar) / B
    return 2.0 * s * s / ((1.0 + s) * L), L


def envelope_density(x, s: float, B: float, hbar: float = 1.0):
    """Fringe-free envelope of the density at the matching time."""
    pref, _ = _pattern_prefactor(s, B, hbar)
    y = B * np.asarray(x, dtype=float) / (2.0 * hbar)
    return pref * sinc(y) ** 2


def pattern_density(x, s: float, B: float, hbar: float = 1.0):
    """Far-field density of the equal superposition at ``t = mL/B``.

    The fringe phase is half the chirp ``B x^2 / (2 hbar L)`` of the spread
    slit state, written through ``BL ~ 2 pi hbar s^2`` as ``y^2 / (2 pi s^2)``
    with ``y = B x / (2 hbar)``, offset by the ``-pi/8`` from the slit
    state's ``-pi/4`` phase.
    """
    pref, _ = _pattern_prefactor(s, B, hbar)
    y = B * np.asarray(x, dtype=float) / (2.0 * hbar)
    fringe = np.cos(y * y / (2.0 * math.pi * s * s) - 0.125 * math.pi) ** 2
    return pref * sinc(y) ** 2 * fringe


def momentum_slit_tail_mass(X: float, B: float, hbar: float = 1.0) -> float:
    """Probability of ``|B>`` outside ``[-X, X]``, via the sine integral."""
    V = B * X / (2.0 * hbar)
    return (2.0 / math.pi) * (math.sin(V) ** 2 / V + 0.5 * math.pi - si(2.0 * V))


# --- state specifications --------------------------------------------------


@dataclass(frozen=True)
class StateSpec:
    kind: str  # "position_slit" | "momentum_slit" | "equal_superposition"
    L: Optional[float] = None
    B: Optional[float] = None
    scale: PhysicalScale = NATURAL

    KINDS = ("position_slit", "momentum_slit", "equal_superposition")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigurationError(f"unknown state kind {self.kind!r}")
        if self.kind != "momentum_slit" and not (self.L is not None and self.L > 0):
            raise ConfigurationError(f"{self.kind} needs a positive L")
        if self.kind != "position_slit" and not (self.B is not None and self.B > 0):
            raise ConfigurationError(f"{self.kind} needs a positive B")

    @classmethod
    def position_slit(cls, L, scale=NATURAL):
        return cls("position_slit", L=L, scale=scale)

    @classmethod
    def momentum_slit(cls, B, scale=NATURAL):
        return cls("momentum_slit", B=B, scale=scale)

    @classmethod
    def superposition(cls, L, B, scale=NATURAL):
        return cls("equal_superposition", L=L, B=B, scale=scale)

    @property
    def s(self) -> float:
        return overlap(self.L, self.B, self.scale.hbar)

    def position_amplitude(self, x):
        """Ideal amplitude on ``x``; rect edges exactly on a node get half height."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        if self.L is not None:
            rect = psi_L_position(x, self.L)
            rect = np.where(np.abs(np.abs(x) - 0.5 * self.L) <= 1e-12 * self.L, 0.5 * rect, rect)
            out += rect
        if self.B is not None:
            out += psi_B_position(x, self.B, self.scale.hbar)
        if self.kind == "equal_superposition":
            out *= superposition_coefficient(self.s)
        return out

    def truncated_mass(self, X: float) -> float:
        """Probability of the ideal state outside ``[-X, X]``."""
        if self.L is not None and 0.5 * self.L > X:
            raise ConfigurationError(f"window half-extent {X} does not contain the slit L={self.L}")
        if self.B is None:
            return 0.0
        tail = momentum_slit_tail_mass(X, self.B, self.scale.hbar)
        if self.kind == "equal_superposition":
            # the slit lies inside the window, so the cross term vanishes outside
            tail *= superposition_coefficient(self.s) ** 2
        return tail

    def timescales(self):
        return timescales(self.L, self.B, self.scale)
