import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "oracles"))

from swarminsar.params import ScenarioParams  # noqa: E402


@pytest.fixture
def ref_params():
    return ScenarioParams()


@pytest.fixture
def tiny():
    """Three UAVs, ten slots; coverage lowered so feasible plans exist."""
    return ScenarioParams(n_uav=3, n_slots=10, c_min=2000.0)


# a feasible reference plan found by a solver run, rounded to the millimetre
FEASIBLE_FORMATION = (
    (-32.589, 68.273), (-36.030, 73.256), (-33.935, 61.622), (-38.062, 66.919), (-44.879, 75.614),
)
FEASIBLE_V_Y = 3.19


@pytest.fixture
def feasible_plan(ref_params):
    import numpy as np

    from swarminsar import comms
    from swarminsar.objective import SwarmPlan

    q = np.array(FEASIBLE_FORMATION)
    return SwarmPlan(q, FEASIBLE_V_Y, comms.allocate_power(q, FEASIBLE_V_Y, ref_params))


# criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
