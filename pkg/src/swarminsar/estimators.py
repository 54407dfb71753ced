"""scikit-learn style planners wrapping the solvers.

Each planner takes its solver settings as constructor keywords (so
``get_params``/``set_params``/``clone`` work) and learns a plan from a
scenario in ``fit``::

    planner = CoevolutionPlanner(outer_population=16, random_state=3)
    planner.fit(ScenarioParams())
    planner.plan_.v_y, planner.fitness_, planner.report_.feasible
"""

from __future__ import annotations

import numbers
from os import PathLike

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .baselines import GaConfig, SaConfig, cga_solve, sa_solve
from .coevolution import CoevolutionConfig, InnerConfig, solve
from .params import ScenarioParams

__all__ = [
    "check_scenario",
    "check_seed",
    "CoevolutionPlanner",
    "GeneticPlanner",
    "AnnealingPlanner",
]


def check_scenario(scenario):
    """Coerce ``scenario`` to :class:`ScenarioParams`.

    Accepts a ``ScenarioParams``, a path to a mission file, a dict of
    scenario keys (aliases allowed) or ``None`` for the reference defaults.
    """
    from . import mission

    if scenario is None:
        return ScenarioParams()
    if isinstance(scenario, ScenarioParams):
        return scenario
    if isinstance(scenario, (str, PathLike)):
        return mission.load_scenario(scenario)
    if isinstance(scenario, dict):
        return mission.parse_config("", list(scenario.items()))[0]
    raise TypeError(f"expected ScenarioParams, path or dict, got {type(scenario).__name__}")


def check_seed(random_state):
    """Non-negative integer seed; ``None`` maps to 0 so fits are reproducible."""
    if random_state is None:
        return 0
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        if random_state >= 0:
            return int(random_state)
    raise ValueError(f"random_state must be a non-negative integer, got {random_state!r}")


def _check_positive_int(name, value):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")


class _Planner(BaseEstimator):
    """Shared ``fit``/``score`` plumbing; subclasses implement ``_solve``."""

    def fit(self, scenario=None, y=None):
        """Plan a mission for ``scenario``.

        Parameters
        ----------
        scenario : ScenarioParams, path, dict or None
        y : ignored

        Returns
        -------
        self
        """
        params = check_scenario(scenario)
        solution = self._solve(params)
        self.scenario_ = params
        self.solution_ = solution
        self.plan_ = solution.plan
        self.report_ = solution.report
        self.fitness_ = solution.fitness
        self.feasible_ = solution.feasible
        self.trace_ = solution.outer_trace
        return self

    def score(self, scenario=None, y=None):
        """Negative fitness of the fitted plan (higher is better)."""
        check_is_fitted(self, "solution_")
        return -self.fitness_


class CoevolutionPlanner(_Planner):
    """Co-evolutionary PSO planner.

    Parameters
    ----------
    outer_population, outer_iterations : int
        Velocity swarm size and generations.
    inner_population, inner_iterations : int
        Formation swarm size and generations per island.
    c1, c2, w_start, w_end, v_pso_max : float
        PSO coefficients shared by both swarms.
    warm_start : bool
        Seed each island with its previous best formation.
    n_jobs : int
        Island worker processes; results do not depend on it.
    random_state : int or None
    """

    def __init__(self, outer_population=128, outer_iterations=100, inner_population=500,
                 inner_iterations=500, c1=2.5, c2=2.0, w_start=0.9, w_end=0.4, v_pso_max=1.0,
                 warm_start=False, n_jobs=1, random_state=None):
        self.outer_population = outer_population
        self.outer_iterations = outer_iterations
        self.inner_population = inner_population
        self.inner_iterations = inner_iterations
        self.c1 = c1
        self.c2 = c2
        self.w_start = w_start
        self.w_end = w_end
        self.v_pso_max = v_pso_max
        self.warm_start = warm_start
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _solve(self, params):
        for name in ("outer_population", "outer_iterations", "inner_population",
                     "inner_iterations", "n_jobs"):
            _check_positive_int(name, getattr(self, name))
        inner = InnerConfig(
            population=self.inner_population, iterations=self.inner_iterations, c1=self.c1,
            c2=self.c2, w_start=self.w_start, w_end=self.w_end, v_pso_max=self.v_pso_max,
        )
        config = CoevolutionConfig(
            outer_population=self.outer_population, outer_iterations=self.outer_iterations,
            inner=inner, c1=self.c1, c2=self.c2, w_start=self.w_start, w_end=self.w_end,
            v_pso_max=self.v_pso_max, worker_count=self.n_jobs,
            seed=check_seed(self.random_state), warm_start=bool(self.warm_start),
        )
        return solve(params, config)


class GeneticPlanner(_Planner):
    """Real-coded GA baseline; parameters mirror :class:`~swarminsar.baselines.GaConfig`."""

    def __init__(self, population=500, generations=300, selection_rate=0.3, mutation_rate=0.1,
                 mutation_scale=0.1, crossover_rate=1.0, blx_alpha=0.1, elite=1,
                 random_state=None):
        self.population = population
        self.generations = generations
        self.selection_rate = selection_rate
        self.mutation_rate = mutation_rate
        self.mutation_scale = mutation_scale
        self.crossover_rate = crossover_rate
        self.blx_alpha = blx_alpha
        self.elite = elite
        self.random_state = random_state

    def _solve(self, params):
        _check_positive_int("population", self.population)
        config = GaConfig(
            population=self.population, generations=self.generations,
            selection_rate=self.selection_rate, mutation_rate=self.mutation_rate,
            mutation_scale=self.mutation_scale, crossover_rate=self.crossover_rate,
            blx_alpha=self.blx_alpha, elite=self.elite, seed=check_seed(self.random_state),
        )
        return cga_solve(params, config)


class AnnealingPlanner(_Planner):
    """Simulated-annealing baseline; parameters mirror :class:`~swarminsar.baselines.SaConfig`."""

    def __init__(self, iterations=5000, t0=10.0, step_scale=0.05, random_state=None):
        self.iterations = iterations
        self.t0 = t0
        self.step_scale = step_scale
        self.random_state = random_state

    def _solve(self, params):
        config = SaConfig(iterations=self.iterations, t0=self.t0, step_scale=self.step_scale,
                          seed=check_seed(self.random_state))
        return sa_solve(params, config)
