import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from propagation_paradox import ConfigurationError, maximize_bound, maximize_numeric, sweep
from propagation_paradox.sweep import SWEEP_COLUMNS, golden_section_max, rows_to_csv

S_STAR = 2 / math.sqrt(3) - 1
# maximizer of the exact defect over BL, from the Fresnel oracle with scipy's bounded search
EXACT_NUMERIC_BL_STAR = 0.2040171
EXACT_NUMERIC_DEFECT_STAR = 0.0844366


@given(st.floats(-5, 5), st.floats(0.1, 3))
def test_golden_section_on_parabola(c, w):
    x, fx = golden_section_max(lambda x: -(x - c) ** 2, c - w, c + 2 * w, tol=1e-10)
    assert x == pytest.approx(c, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("bracket", [(0.0, 0.5), (0.1, 0.2), (0.01, 0.9)])
def test_maximize_bound(bracket):
    s, best = maximize_bound(bracket)
    assert s == pytest.approx(S_STAR, abs=1e-8)
    assert best == pytest.approx(0.0717968, abs=1e-7)


def test_analytic_sweep_is_unimodal_and_peaks_at_optimum():
    rows = sweep(0.005, 0.2, 400)
    vals = [r.analytic_bound for r in rows]
    k = vals.index(max(vals))
    assert all(a < b for a, b in zip(vals[:k], vals[1:k + 1]))
    assert all(a > b for a, b in zip(vals[k:], vals[k + 1:]))
    assert rows[k].u == pytest.approx(0.0376, abs=5e-4)
    assert all(r.numeric_defect is None for r in rows)


def test_sweep_validation():
    for args in ((0.0, 0.1, 5), (0.2, 0.1, 5), (0.1, 2.0, 5), (0.1, 0.2, 1)):
        with pytest.raises(ConfigurationError):
            sweep(*args)
    with pytest.raises(ConfigurationError):
        sweep(0.01, 0.1, 3, mode="fast")


def test_csv_layout():
    text = rows_to_csv(sweep(0.01, 0.1, 3))
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 4 and all(len(l.split(",")) == 5 for l in lines)


def test_full_sweep_numeric_defect_exceeds_envelope_bound(light_policy):
    # the envelope overestimates P(M), so the measured defect sits above the bound
    for r in sweep(0.02, 0.07, 3, mode="full", policy=light_policy):
        assert r.numeric_defect >= r.analytic_bound - 5e-3
        assert r.numeric_defect == pytest.approx(oracles.exact_defect(4 * r.u)[0], abs=2e-3)


def test_maximize_numeric(light_policy):
    bl, best, report = maximize_numeric(light_policy)
    assert bl == pytest.approx(EXACT_NUMERIC_BL_STAR, abs=0.015)
    assert best == pytest.approx(EXACT_NUMERIC_DEFECT_STAR, abs=5e-4)
    assert report.defect == best
    assert best >= maximize_bound()[1]


def test_maximize_numeric_bracket_validation():
    with pytest.raises(ConfigurationError):
        maximize_numeric(bracket=(0.3, 0.1))
