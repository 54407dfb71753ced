import dataclasses

import numpy as np
import pytest

from swarminsar import coevolution
from swarminsar.coevolution import CoevolutionConfig, InnerConfig
from swarminsar.objective import evaluate_plan


def tiny_config(**kw):
    base = dict(outer_population=4, outer_iterations=3,
                inner=InnerConfig(population=30, iterations=30), seed=7)
    base.update(kw)
    return CoevolutionConfig(**base)


@pytest.fixture(scope="module")
def tiny_solution():
    from swarminsar.params import ScenarioParams

    params = ScenarioParams(n_uav=3, n_slots=10, c_min=2000.0)
    return params, coevolution.solve(params, tiny_config())


def test_tiny_solution_is_feasible(tiny_solution):
    params, sol = tiny_solution
    assert sol.feasible
    assert sol.report.feasible
    assert all(sol.report.flags.values())
    assert params.v_min <= sol.plan.v_y <= params.v_max


def test_elitism(tiny_solution):
    _, sol = tiny_solution
    rows = sol.outer_trace
    assert [r["generation"] for r in rows] == [0, 1, 2, 3]
    # the generation-1 best bounds every generation-1 particle from below
    assert sol.fitness <= rows[1]["best_fitness"]
    fits = [r["best_fitness"] for r in rows]
    assert all(y <= x for x, y in zip(fits, fits[1:]))


def test_fitness_matches_report(tiny_solution):
    params, sol = tiny_solution
    assert sol.fitness == sol.report.sigma_h
    assert sol.outer_trace[-1]["best_fitness"] == sol.fitness
    assert sol.outer_trace[-1]["sigma_h"] == sol.report.sigma_h
    again = evaluate_plan(sol.plan, params)
    assert again.sigma_h == sol.report.sigma_h


def test_inner_traces_kept(tiny_solution):
    _, sol = tiny_solution
    assert len(sol.inner_traces) == 4
    assert all(len(t) == 31 for t in sol.inner_traces)


def test_same_seed_same_solution(tiny):
    a = coevolution.solve(tiny, tiny_config(outer_iterations=2))
    b = coevolution.solve(tiny, tiny_config(outer_iterations=2))
    np.testing.assert_array_equal(a.plan.formation, b.plan.formation)
    assert a.plan.v_y == b.plan.v_y
    assert a.fitness == b.fitness


def strip_time(rows):
    return [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]


def test_worker_count_does_not_change_result(tiny):
    a = coevolution.solve(tiny, tiny_config(outer_iterations=2, worker_count=1))
    b = coevolution.solve(tiny, tiny_config(outer_iterations=2, worker_count=2))
    assert strip_time(a.outer_trace) == strip_time(b.outer_trace)
    np.testing.assert_array_equal(a.plan.formation, b.plan.formation)


def test_different_seeds_differ(tiny):
    a = coevolution.solve(tiny, tiny_config(outer_iterations=1, seed=1))
    b = coevolution.solve(tiny, tiny_config(outer_iterations=1, seed=2))
    assert not np.array_equal(a.plan.formation, b.plan.formation)


def test_island_seeds_are_distinct():
    keys = {tuple(coevolution.island_seed(0, g, k).generate_state(2)) for g in range(3) for k in range(4)}
    assert len(keys) == 12


def test_unsatisfiable_scenario_reports_infeasible(tiny):
    sol = coevolution.solve(tiny.replace(e_max_wh=0.0), tiny_config(outer_iterations=1))
    assert not sol.feasible
    assert sol.report.g11 > 0
    assert sol.fitness > 0


def test_warm_start_runs(tiny):
    sol = coevolution.solve(tiny, tiny_config(outer_iterations=2, warm_start=True))
    assert len(sol.outer_trace) == 3


def test_with_budget():
    cfg = coevolution.with_budget(CoevolutionConfig(), outer_population=16, inner_iterations=100)
    assert cfg.outer_population == 16
    assert cfg.inner.iterations == 100
    assert cfg.inner.population == 500


@pytest.mark.parametrize("kw", [dict(outer_population=0), dict(outer_iterations=0), dict(worker_count=0)])
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        dataclasses.replace(CoevolutionConfig(), **kw).validate()
