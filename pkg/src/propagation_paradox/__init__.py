"""Numeric and closed-form audit of straight-line propagation for slit superpositions."""

__version__ = "0.1.0"

from .core import (
    ConfigurationError,
    Interval,
    PhysicalScale,
    Timescales,
    classical_bound_interval,
    matching_time,
    photon_effective_mass,
    straight_line_position,
    timescales,
)
from .specfun import SiResult, si, sinc, sine_integral
from .states import (
    OverlapRangeError,
    StateSpec,
    defect_lower_bound,
    envelope_density,
    invert_overlap,
    marginal_probabilities,
    optimal_overlap,
    overlap,
    pattern_density,
)
from .propagator import (
    ConvergenceError,
    ConvergencePolicy,
    Grid,
    SampledWavefunction,
    converge,
    discretize,
    free_propagate,
    interval_probability,
    to_momentum,
)
from .audit import AuditPolicy, AuditReport, check_inequality, evaluate, frechet_lower_bound
from .sweep import SweepRow, maximize_bound, maximize_numeric, sweep
