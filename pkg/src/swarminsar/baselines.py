"""Benchmark solvers: a real-coded genetic algorithm and simulated annealing.

Both search the flattened ``[x_1, z_1, ..., x_I, z_I, v_y]`` vector; powers
are filled with the minimum-power allocation, so the candidate fitness is
the same composed penalty the co-evolutionary solver uses.  The generic
minimisers (:func:`minimize_ga`, :func:`minimize_sa`) accept any batch
fitness callable returning a plain array or a :class:`~swarminsar.pso.Evaluation`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .coevolution import Solution, plan_solution
from .objective import SIGMA_H_CAP, joint_bounds, joint_terms
from .pso import Evaluation

__all__ = [
    "GaConfig",
    "SaConfig",
    "OptimResult",
    "minimize_ga",
    "minimize_sa",
    "reflect_into",
    "temperature",
    "cga_solve",
    "sa_solve",
]

_CGA_KEY = 2
_SA_KEY = 3


@dataclass(frozen=True)
class GaConfig:
    """Truncation-selection GA with blend crossover and Gaussian mutation.

    ``mutation_scale`` is the mutation standard deviation as a fraction of
    each coordinate's range.
    """

    population: int = 500
    generations: int = 300
    selection_rate: float = 0.3
    mutation_rate: float = 0.1
    mutation_scale: float = 0.1
    crossover_rate: float = 1.0
    blx_alpha: float = 0.1
    elite: int = 1
    seed: int = 0
    penalty_cap: float = SIGMA_H_CAP

    def validate(self):
        if self.population < 1 or self.generations < 0:
            raise ValueError("population must be >= 1 and generations >= 0")
        if not 0 < self.selection_rate <= 1:
            raise ValueError(f"selection_rate must lie in (0, 1], got {self.selection_rate}")
        for name in ("mutation_rate", "crossover_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_scale < 0 or self.blx_alpha < 0 or self.elite < 0:
            raise ValueError("mutation_scale, blx_alpha and elite must be >= 0")


@dataclass(frozen=True)
class SaConfig:
    """Single-chain annealing with cooling ``T_k = t0 / (k + 1)``."""

    iterations: int = 5000
    t0: float = 10.0
    step_scale: float = 0.05
    seed: int = 0
    penalty_cap: float = SIGMA_H_CAP

    def validate(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.t0 < 0 or self.step_scale < 0:
            raise ValueError("t0 and step_scale must be >= 0")


@dataclass
class OptimResult:
    x: np.ndarray
    fitness: float
    evaluation: Evaluation  # single row
    sigma_h_max: float
    history: list  # best fitness after each generation/iteration, starting at 0
    n_accepted: int = 0


class _Penalty:
    """Worst feasible objective seen so far, ``cap`` before any."""

    def __init__(self, cap):
        self.level = float(cap)
        self.seen = False

    def observe(self, ev):
        ok = ev.feasible & np.isfinite(ev.objective)
        if np.any(ok):
            worst = float(np.max(ev.objective[ok]))
            self.level = worst if not self.seen else max(self.level, worst)
            self.seen = True

    def __call__(self, ev):
        return np.where(ev.feasible, ev.objective, self.level + ev.violation)


def _evaluate(fitness_fn, x, penalty):
    ev = fitness_fn(x)
    if not isinstance(ev, Evaluation):
        ev = Evaluation.unconstrained(ev)
    penalty.observe(ev)
    return ev


def _rng(seed, key):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def reflect_into(x, lower, upper):
    """Mirror coordinates back into ``[lower, upper]`` (any number of bounces)."""
    width = upper - lower
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.mod(x - lower, 2.0 * width)
    t = np.where(width > 0, t, 0.0)
    return lower + np.where(t > width, 2.0 * width - t, t)


def temperature(k, t0):
    """Fast-annealing temperature of iteration ``k`` (0-based)."""
    return t0 / (k + 1)


def minimize_ga(fitness_fn, lower, upper, config, callback=None):
    """Elitist real-coded GA.

    Each generation the best ``selection_rate`` fraction forms the mating
    pool; the first ``elite`` pool members survive unchanged and every other
    slot is filled by a child of a pool member (cycled in rank order) and a
    random pool partner.  Children are blended (BLX-alpha) with probability
    ``crossover_rate``, mutated gene-wise with probability ``mutation_rate``
    and clipped to the box.

    ``callback(generation, best_x, best_eval, best_fitness, sigma_h_max)`` is
    called after the initial population and after every generation.
    """
    config.validate()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rng = _rng(config.seed, _CGA_KEY)
    n, d = config.population, lower.size
    penalty = _Penalty(config.penalty_cap)
    pop = rng.uniform(lower, upper, size=(n, d))
    ev = _evaluate(fitness_fn, pop, penalty)
    fit = penalty(ev)
    k = int(np.argmin(fit))
    best_x, best_ev = pop[k].copy(), ev.take(np.array([k]))
    history = [float(penalty(best_ev)[0])]
    if callback is not None:
        callback(0, best_x, best_ev, history[-1], penalty.level)
    n_sel = max(1, int(round(config.selection_rate * n)))
    n_el = min(config.elite, n_sel, n)
    m = n - n_el
    sigma = config.mutation_scale * (upper - lower)
    for gen in range(1, config.generations + 1):
        order = np.argsort(penalty(ev), kind="stable")
        pool = pop[order[:n_sel]]
        a = pool[(np.arange(m) + n_el) % n_sel]
        b = pool[rng.integers(n_sel, size=m)]
        cross = rng.random(m) < config.crossover_rate
        u = rng.random((m, d))
        lo_ab = np.minimum(a, b)
        span = np.abs(a - b)
        blended = lo_ab - config.blx_alpha * span + u * (1.0 + 2.0 * config.blx_alpha) * span
        child = np.where(cross[:, None], blended, a)
        mutate = rng.random((m, d)) < config.mutation_rate
        noise = rng.normal(0.0, 1.0, size=(m, d)) * sigma
        child = np.clip(np.where(mutate, child + noise, child), lower, upper)
        pop = np.vstack([pool[:n_el], child])
        ev = _evaluate(fitness_fn, pop, penalty)
        fit = penalty(ev)
        k = int(np.argmin(fit))
        if fit[k] < penalty(best_ev)[0]:
            best_x, best_ev = pop[k].copy(), ev.take(np.array([k]))
        history.append(float(penalty(best_ev)[0]))
        if callback is not None:
            callback(gen, best_x, best_ev, history[-1], penalty.level)
    return OptimResult(best_x, history[-1], best_ev, penalty.level, history)


def minimize_sa(fitness_fn, lower, upper, config, callback=None, x0=None):
    """Metropolis annealing with Gaussian proposals reflected into the box.

    Differences in fitness are computed with the current penalty level for
    both the incumbent and the proposal.  ``callback`` is called as in
    :func:`minimize_ga` with the iteration number.
    """
    config.validate()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rng = _rng(config.seed, _SA_KEY)
    penalty = _Penalty(config.penalty_cap)
    start = rng.uniform(lower, upper)
    x = start if x0 is None else reflect_into(np.asarray(x0, dtype=float), lower, upper)
    ev = _evaluate(fitness_fn, x[None], penalty)
    best_x, best_ev = x.copy(), ev
    history = [float(penalty(best_ev)[0])]
    if callback is not None:
        callback(0, best_x, best_ev, history[-1], penalty.level)
    scale = config.step_scale * (upper - lower)
    accepted = 0
    for k in range(config.iterations):
        t = temperature(k, config.t0)
        prop = reflect_into(x + rng.normal(0.0, 1.0, size=x.shape) * scale, lower, upper)
        u = rng.random()
        ev_p = _evaluate(fitness_fn, prop[None], penalty)
        f_new, f_cur = float(penalty(ev_p)[0]), float(penalty(ev)[0])
        # equal values (two horizon points both at inf) count as a zero step
        delta = 0.0 if f_new == f_cur else f_new - f_cur
        if delta <= 0 or (t > 0 and u < math.exp(-delta / t)):
            x, ev = prop, ev_p
            accepted += 1
        if penalty(ev)[0] < penalty(best_ev)[0]:
            best_x, best_ev = x.copy(), ev
        history.append(float(penalty(best_ev)[0]))
        if callback is not None:
            callback(k + 1, best_x, best_ev, history[-1], penalty.level)
    return OptimResult(best_x, history[-1], best_ev, penalty.level, history, accepted)


def scenario_evaluator(params):
    """Batch fitness callable over flattened formation + velocity rows."""

    def evaluate(x):
        objective, violation, feasible, _, _ = joint_terms(x, params)
        return Evaluation(objective, violation, feasible)

    return evaluate


class _Tracer:
    """Builds outer-style trace rows for the current best of a baseline run."""

    def __init__(self, params, progress=None):
        self.params = params
        self.progress = progress
        self.rows = []
        self.t0 = time.perf_counter()
        self._key = None
        self._cols = None

    def __call__(self, generation, best_x, best_ev, best_fitness, sigma_h_max):
        # the best is re-scored alone so the trace matches evaluate_plan bit for bit
        key = best_x.tobytes()
        if key != self._key:
            objective, violation, feasible, ft, pt = joint_terms(best_x, self.params)
            self._cols = {name: float(ft[name][0]) for name in ("g2", "g5", "g6", "g7", "g8")}
            self._cols.update(g10=float(pt["g10"][0]), g11=float(pt["g11"][0]),
                              sigma_h=float(objective[0]), v_y=float(best_x[-1]))
            self._score = (float(objective[0]), float(violation[0]), bool(feasible[0]))
            self._key = key
        objective, violation, feasible = self._score
        row = {
            "generation": generation,
            "wall_time_s": time.perf_counter() - self.t0,
            "best_fitness": objective if feasible else sigma_h_max + violation,
            "feasible": feasible,
            **self._cols,
        }
        self.rows.append(row)
        if self.progress is not None:
            self.progress(row)


def _solve(minimizer, params, config, progress):
    lo, hi = joint_bounds(params)
    tracer = _Tracer(params, progress)
    t0 = time.perf_counter()
    res = minimizer(scenario_evaluator(params), lo, hi, config, callback=tracer)
    formation = res.x[:-1].reshape(params.n_uav, 2)
    return plan_solution(
        params, formation, float(res.x[-1]), tracer.rows[-1]["best_fitness"], tracer.rows, [],
        config.seed,
        time.perf_counter() - t0,
    )


def cga_solve(params, config=None, progress=None) -> Solution:
    """Genetic-algorithm baseline on a scenario; see :func:`minimize_ga`."""
    return _solve(minimize_ga, params, config or GaConfig(), progress)


def sa_solve(params, config=None, progress=None) -> Solution:
    """Simulated-annealing baseline on a scenario; see :func:`minimize_sa`."""
    return _solve(minimize_sa, params, config or SaConfig(), progress)
