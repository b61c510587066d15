"""Physical scale, intervals, characteristic times and straight-line kinematics."""
from __future__ import annotations

import math
from dataclasses import dataclass


class ConfigurationError(ValueError):
    """Invalid physical or numerical configuration."""


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0.0) or math.isinf(v):
            raise ConfigurationError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class PhysicalScale:
    """Reduced Planck constant and particle mass. Defaults are natural units."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        _require_positive(hbar=self.hbar, mass=self.mass)


NATURAL = PhysicalScale()


@dataclass(frozen=True)
class Interval:
    """Closed window ``|x - center| <= width/2`` in position or momentum."""

    center: float
    width: float

    def __post_init__(self):
        _require_positive(width=self.width)

    @classmethod
    def centered(cls, width: float) -> "Interval":
        return cls(0.0, width)

    @property
    def lo(self) -> float:
        return self.center - 0.5 * self.width

    @property
    def hi(self) -> float:
        return self.center + 0.5 * self.width

    def contains(self, x: float) -> bool:
        return abs(x - self.center) <= 0.5 * self.width

    __contains__ = contains


@dataclass(frozen=True)
class Timescales:
    t_match: float
    t_farfield_L: float
    t_nearfield_B: float


def straight_line_position(x0: float, p: float, t: float, scale: PhysicalScale = NATURAL) -> float:
    """Position of a free classical particle, ``x0 + p t / m``."""
    return x0 + p * t / scale.mass


def classical_bound_interval(
    L_int: Interval, B_int: Interval, t: float, scale: PhysicalScale = NATURAL
) -> Interval:
    """Window reachable at time ``t`` by straight lines starting in ``L_int``
    with momenta in ``B_int``."""
    if t < 0:
        raise ConfigurationError(f"classical bound is only defined for t >= 0, got {t}")
    v = t / scale.mass
    return Interval(L_int.center + B_int.center * v, L_int.width + B_int.width * v)


def matching_time(L: float, B: float, scale: PhysicalScale = NATURAL) -> float:
    """Time ``mL/B`` at which the spreading slit state matches the momentum-slit profile."""
    _require_positive(L=L, B=B)
    return scale.mass * L / B


def photon_effective_mass(wavelength: float, c: float, hbar: float = 1.0) -> float:
    """Paraxial effective mass ``2 pi hbar / (c lambda)`` of transverse photon motion."""
    _require_positive(wavelength=wavelength, c=c, hbar=hbar)
    return 2.0 * math.pi * hbar / (c * wavelength)


def timescales(L: float, B: float, scale: PhysicalScale = NATURAL) -> Timescales:
    _require_positive(L=L, B=B)
    m, hbar = scale.mass, scale.hbar
    return Timescales(
        t_match=m * L / B,
        t_farfield_L=m * L * L / (2.0 * math.pi * hbar),
        t_nearfield_B=2.0 * math.pi * hbar * m / (B * B),
    )
