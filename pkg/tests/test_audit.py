import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from propagation_paradox import (
    AuditPolicy,
    ConfigurationError,
    Grid,
    PhysicalScale,
    StateSpec,
    check_inequality,
    discretize,
    evaluate,
    free_propagate,
    frechet_lower_bound,
)
from propagation_paradox.audit import SATISFIED, VIOLATED

prob = st.floats(0.0, 1.0)

# exact Fresnel-integral values at the optimum BL* (see tests/oracles.py)
EXACT_P_L = 0.5773502682582099
EXACT_P_M = 0.0717996627627832


def test_frechet_examples():
    assert frechet_lower_bound(0.6, 0.6) == pytest.approx(0.2)
    assert frechet_lower_bound(0.3, 0.4) == 0.0
    assert frechet_lower_bound(1.0, 1.0) == 1.0
    for bad in ((-0.1, 0.5), (0.5, 1.1), (math.nan, 0.5)):
        with pytest.raises(ValueError):
            frechet_lower_bound(*bad)


@given(prob, prob)
def test_frechet_is_the_sharp_lower_bound(a, b):
    lo = frechet_lower_bound(a, b)
    assert 0.0 <= lo <= min(a, b) + 1e-15
    assert lo == frechet_lower_bound(b, a)


def test_check_inequality_examples():
    assert check_inequality(0.6, 0.6, 0.1) == VIOLATED
    assert check_inequality(0.6, 0.6, 0.2) == SATISFIED
    assert check_inequality(0.6, 0.6, 0.15, margin=0.06) == SATISFIED
    assert check_inequality(0.3, 0.4, 0.0) == SATISFIED


@given(prob, prob, prob, prob)
def test_check_inequality_monotone_in_pm(a, b, pm, extra):
    if check_inequality(a, b, pm) == SATISFIED:
        assert check_inequality(a, b, min(1.0, pm + extra)) == SATISFIED


def test_policy_validation():
    for kw in ({"grid_n": 12}, {"grid_n": 512}, {"convergence_tol": 0.0},
               {"truncation_threshold": -1.0}, {"points_per_L": 48}):
        with pytest.raises(ConfigurationError):
            AuditPolicy(**kw)


# --- the optimum state ----------------------------------------------------------

def test_optimum_against_exact_oracle(optimum_report):
    r = optimum_report
    assert abs(r.P_L - EXACT_P_L) <= r.margin
    assert abs(r.P_B - EXACT_P_L) <= r.margin
    assert abs(r.P_M - EXACT_P_M) <= 2e-5
    assert r.P_M == pytest.approx(oracles.exact_defect(2 * math.pi * r.BL_over_2pi_hbar)[1], abs=2e-5)


def test_optimum_violates(optimum_report):
    r = optimum_report
    assert r.verdict == VIOLATED == r.check()
    assert r.defect == pytest.approx(r.P_L + r.P_B - 1 - r.P_M, abs=1e-15)
    assert r.defect == pytest.approx(0.0829, abs=5e-4)
    assert r.defect > 10 * r.margin


def test_analytic_and_numeric_marginals_agree(optimum_report):
    # (1+s)/2 ignores int_L |<x|B>|^2 - s^2, which is tiny at small BL
    r = optimum_report
    assert r.analytic_P_L_B == pytest.approx(EXACT_P_L, abs=1e-8)
    assert r.required_PM_analytic == pytest.approx(r.s)


def test_report_serializes(optimum_report):
    d = optimum_report.to_dict()
    text = json.dumps(d, allow_nan=False)
    assert json.loads(text)["verdict"] == VIOLATED
    diag = d["diagnostics"]
    assert diag["M_interval"] == [0.0, pytest.approx(2.0)]
    assert diag["truncated_mass"] <= 1e-4
    assert diag["convergence"]["error_estimate"] < 1e-5
    assert "farfield" in diag


def test_bare_slit_is_classical(light_policy):
    r = evaluate(0.15039442, light_policy, kind="position_slit")
    assert r.P_L == pytest.approx(1.0, abs=1e-12)
    assert r.verdict == SATISFIED
    # the bound is P(B) itself, and the spreading slit keeps more than that in M
    assert r.bound == pytest.approx(r.P_B, abs=1e-12)
    assert r.P_M > r.bound


def test_unit_rescaling_invariance(light_policy):
    base = evaluate(0.15039442, light_policy)
    scaled = evaluate(2 * 0.15039442, light_policy, PhysicalScale(hbar=2.0, mass=3.0), L=2.0)
    for k in ("s", "BL_over_2pi_hbar", "P_L", "P_B", "P_M", "defect"):
        assert getattr(scaled, k) == pytest.approx(getattr(base, k), abs=1e-9)


@pytest.mark.parametrize("BL", [0.10, 0.20, 0.30])
def test_numeric_defect_against_exact_oracle(BL, light_policy):
    r = evaluate(BL, light_policy)
    defect, pm = oracles.exact_defect(BL)
    assert abs(r.P_M - pm) < 2e-4
    assert abs(r.defect - defect) < r.margin + 2e-4


def test_evaluate_rejects_unknown_kind_and_oversized_grids():
    with pytest.raises(ConfigurationError):
        evaluate(0.15, kind="gaussian")
    with pytest.raises(ConfigurationError, match="max_grid_n"):
        evaluate(2 * math.pi * 1e-6)


def test_density_at_matching_time_against_exact_oracle(optimum_report):
    bl = 2 * math.pi * optimum_report.BL_over_2pi_hbar
    g = optimum_report.diagnostics["grid"]
    grid = Grid(g["n"], g["half_extent"])
    psi = free_propagate(discretize(StateSpec.superposition(1.0, bl), grid, None), 1 / bl)
    w = np.abs(grid.x) <= 10
    exact = oracles.exact_superposition_density(grid.x[w], 1 / bl, 1.0, bl)
    rel = np.linalg.norm(psi.density()[w] - exact) / np.linalg.norm(exact)
    assert rel < 1e-4
