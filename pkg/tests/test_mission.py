import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarminsar import mission
from swarminsar.mission import ScenarioParseError, SolverSettings
from swarminsar.params import ScenarioError, ScenarioParams


def test_empty_file_gives_defaults():
    params, solver = mission.parse_config("")
    assert params == ScenarioParams()
    assert solver == SolverSettings()


def test_reference_defaults():
    p = ScenarioParams()
    assert (p.n_uav, p.n_slots, p.h_amb_min, p.c_min, p.v_min, p.v_max) == (5, 200, 1.2, 4.5e4, 1.0, 12.0)


def test_h_amb_min_value():
    params, _ = mission.parse_config("[constraints]\nh_amb_min = 1.2\n")
    assert params.h_amb_min == 1.2


def test_z_range_error_names_key():
    with pytest.raises(ScenarioError) as err:
        mission.parse_config("[constraints]\nz_min = 200\nz_max = 100\n")
    assert err.value.key == "z_min"


def test_unknown_key_rejected():
    with pytest.raises(ScenarioError) as err:
        mission.parse_config("[radar]\nbogus = 1\n")
    assert err.value.key == "bogus"


def test_key_in_wrong_section_rejected():
    with pytest.raises(ScenarioError) as err:
        mission.parse_config("[radar]\nz_min = 3\n")
    assert err.value.key == "z_min"


def test_unknown_section_rejected():
    with pytest.raises(ScenarioError):
        mission.parse_config("[weather]\nwind = 3\n")


@pytest.mark.parametrize("text", ["no section header\n", "[radar]\nprf\n", "[radar]\nprf = fast\n",
                                  "[radar]\nprf = 1\nprf = 2\n", "[geometry]\nn_uav = 2.5\n"])
def test_malformed_text_is_a_parse_error(text):
    with pytest.raises(ScenarioParseError):
        mission.parse_config(text)


def test_aliases_and_overrides():
    text = "[geometry]\nI = 3\n[constraints]\nC_min = 2e4\n[solver]\nD1 = 40\nK2 = 7\n"
    params, solver = mission.parse_config(text, ["h_min=2", "N=50"])
    assert (params.n_uav, params.c_min, params.h_amb_min, params.n_slots) == (3, 2e4, 2.0, 50)
    assert (solver.inner_population, solver.outer_iterations) == (40, 7)


def test_override_must_be_key_value():
    with pytest.raises(ScenarioParseError):
        mission.parse_config("", ["h_amb_min"])


def test_phase_pairs_and_power_list():
    text = "[radar]\nphase_pairs = 1-2, 1-3\np_rad_dbw = 15, 15, 14\n[geometry]\nn_uav = 3\n"
    params, _ = mission.parse_config(text)
    assert params.phase_pairs == ((1, 2), (1, 3))
    assert params.p_rad_dbw == (15.0, 15.0, 14.0)


def test_blade_model_fills_rotor_inputs():
    params, _ = mission.parse_config("[energy]\npropulsion_model = blade\n")
    assert params.rotor_solidity == mission.BLADE_ROTOR["rotor_solidity"]
    assert params.rotor_area == mission.BLADE_ROTOR["rotor_area"]
    given_area, _ = mission.parse_config("[energy]\npropulsion_model = blade\nrotor_area = 0.5\n")
    assert given_area.rotor_area == 0.5


def test_unknown_solver_rejected():
    with pytest.raises(ScenarioError):
        mission.parse_config("[solver]\nsolver = ddpg\n")


def test_round_trip_defaults():
    params, solver = mission.parse_config(mission.scenario_to_ini(ScenarioParams(), SolverSettings()))
    assert params == ScenarioParams()
    assert solver == SolverSettings()


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 8), st.integers(1, 300), st.floats(0.1, 5.0), st.floats(1e3, 1e5),
    st.floats(0.5, 4.0), st.floats(1.0, 60.0), st.booleans(),
)
def test_round_trip(n_uav, n_slots, delta_t, c_min, h_min, z_min, warm):
    params = ScenarioParams(n_uav=n_uav, n_slots=n_slots, delta_t=delta_t, c_min=c_min,
                            h_amb_min=h_min, z_min=z_min, phase_pairs=((1, 2),))
    solver = SolverSettings(warm_start=warm, seed=n_slots)
    back = mission.parse_config(mission.scenario_to_ini(params, solver))
    assert back == (params, solver)


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioParseError):
        mission.load_scenario(tmp_path / "absent.ini")


def test_load_scenario_file(tmp_path):
    path = tmp_path / "m.ini"
    path.write_text("[geometry]\nn_uav = 4\n", encoding="utf-8")
    assert mission.load_scenario(path).n_uav == 4


def test_solver_settings_builders():
    s = SolverSettings(inner_population=40, outer_population=6, ga_population=30, sa_iterations=9)
    co = s.coevolution(seed=5)
    assert (co.inner.population, co.outer_population, co.seed) == (40, 6, 5)
    assert s.ga().population == 30
    assert s.sa(seed=2).iterations == 9


def test_write_trace(tmp_path):
    row = {c: 0.5 for c in mission.TRACE_COLUMNS}
    row.update(generation=0, feasible=True, wall_time_s=1.25)
    mission.write_trace(tmp_path / "a.csv", [row])
    mission.write_trace(tmp_path / "b.csv", [row], include_time=False)
    with open(tmp_path / "a.csv", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == mission.TRACE_COLUMNS
    assert rows[1][:4] == ["0", "1.25", "0.5", "1"]
    with open(tmp_path / "b.csv", encoding="utf-8") as fh:
        assert list(csv.reader(fh))[1][1] == ""


def test_finite_values_are_json_safe():
    assert mission._finite(np.inf) == "inf"
    assert mission._finite(-np.inf) == "-inf"
    assert mission._finite(np.nan) == "nan"
    assert json.dumps(mission._finite(2.5)) == "2.5"
