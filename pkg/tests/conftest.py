import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from propagation_paradox import AuditPolicy, evaluate, invert_overlap, optimal_overlap  # noqa: E402


@pytest.fixture(scope="session")
def bl_star():
    return invert_overlap(optimal_overlap())


@pytest.fixture(scope="session")
def optimum_report(bl_star):
    return evaluate(bl_star)


@pytest.fixture(scope="session")
def light_policy():
    """Coarser settings for tests that run many audits."""
    return AuditPolicy(grid_n=2**16, x_extent_over_L=200, truncation_threshold=1e-3,
                       convergence_tol=1e-4, farfield_factor=0.0)


@pytest.fixture
def two_pi():
    return 2 * math.pi


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
