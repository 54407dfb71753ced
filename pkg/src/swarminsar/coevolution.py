"""Two-species co-evolutionary PSO for formation, velocity and power planning.

An outer swarm searches the swarm velocity ``v_y``; every outer particle owns
an island (an inner PSO over the ``2I`` formation coordinates) that is evolved
for ``K1`` generations with that velocity fixed.  Communication powers are
never searched: for a given formation and velocity the minimum-power
allocation is feasible exactly when a peak-power and an energy cap hold, so
the outer fitness only needs those two checks.

Islands run independently between generation barriers.  Their random streams
are derived from ``(seed, generation, island)`` only, which makes results
identical for any ``worker_count``.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import comms, pso
from .objective import (
    SIGMA_H_CAP,
    ConstraintReport,
    SwarmPlan,
    evaluate_plan,
    formation_bounds,
    formation_terms,
    power_terms,
)

__all__ = ["InnerConfig", "CoevolutionConfig", "IslandResult", "Solution", "solve", "island_seed",
           "plan_solution", "with_budget"]

log = logging.getLogger(__name__)

_OUTER_KEY = 0
_ISLAND_KEY = 1


@dataclass(frozen=True)
class InnerConfig:
    """Formation swarm settings (population ``D1``, generations ``K1``)."""

    population: int = 500
    iterations: int = 500
    c1: float = 2.5
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_pso_max: float = 1.0


@dataclass(frozen=True)
class CoevolutionConfig:
    outer_population: int = 128
    outer_iterations: int = 100
    inner: InnerConfig = field(default_factory=InnerConfig)
    c1: float = 2.5
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_pso_max: float = 1.0
    worker_count: int = 1
    seed: int = 0
    sigma_h_cap: float = SIGMA_H_CAP
    warm_start: bool = False

    def validate(self):
        if self.outer_population < 1 or self.outer_iterations < 1:
            raise ValueError("outer population and iterations must be >= 1")
        if self.inner.population < 1 or self.inner.iterations < 1:
            raise ValueError("inner population and iterations must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.sigma_h_cap <= 0:
            raise ValueError("sigma_h_cap must be > 0")
        for w_start, w_end in ((self.w_start, self.w_end), (self.inner.w_start, self.inner.w_end)):
            if not 0 <= w_end <= w_start <= 1:
                raise ValueError(f"need 0 <= w_end <= w_start <= 1, got {w_start}, {w_end}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")


@dataclass
class IslandResult:
    v_y: float
    formation: np.ndarray  # (I, 2)
    sigma_h: float
    violation: float  # formation-side violations of the best formation
    g: dict  # g2..g11 of the best formation at this velocity
    power_feasible: bool
    sigma_h_max: float | None  # worst feasible sigma_h seen on the island
    trace: list


@dataclass
class Solution:
    plan: SwarmPlan
    report: ConstraintReport
    fitness: float
    feasible: bool
    outer_trace: list
    inner_traces: list
    seed: int
    wall_time_s: float = 0.0


def island_seed(seed, generation, island):
    """Random stream of one island; a pure function of its coordinates."""
    return np.random.SeedSequence(seed, spawn_key=(_ISLAND_KEY, generation, island))


def formation_evaluator(params, v_y):
    """Inner fitness callable for a fixed velocity (penalty applied by the PSO)."""

    def evaluate(positions):
        q = positions.reshape(len(positions), params.n_uav, 2)
        t = formation_terms(q, v_y, params)
        violation = t["g2"] + t["g5"] + t["g6"] + t["g7"] + t["g8"]
        sigma_h = t["sigma_h"]
        return pso.Evaluation(sigma_h, violation, (violation == 0) & np.isfinite(sigma_h))

    return evaluate


def run_island(params, inner, v_y, seed_seq, sigma_h_max, cap, warm=None):
    """Evolve one formation swarm for a fixed velocity."""
    lo, hi = formation_bounds(params)
    cfg = pso.PsoConfig(
        dimension=2 * params.n_uav, population=inner.population, iterations=inner.iterations,
        c1=inner.c1, c2=inner.c2, w_start=inner.w_start, w_end=inner.w_end,
        v_pso_max=inner.v_pso_max, lower=lo, upper=hi, seed=seed_seq, penalty_cap=cap,
    )
    best, _, state = pso.run(cfg, formation_evaluator(params, v_y), positions=warm, sigma_h_max=sigma_h_max)
    q = best.reshape(params.n_uav, 2)
    ft = formation_terms(q[None], v_y, params)
    pt = power_terms(q[None], v_y, params)
    g = {name: float(ft[name][0]) for name in ("g2", "g5", "g6", "g7", "g8")}
    g.update(g10=float(pt["g10"][0]), g11=float(pt["g11"][0]))
    # the best is re-scored alone so its numbers match evaluate_plan bit for bit
    return IslandResult(
        v_y=float(v_y),
        formation=q,
        sigma_h=float(ft["sigma_h"][0]),
        violation=float(sum(g[name] for name in ("g2", "g5", "g6", "g7", "g8"))),
        g=g,
        power_feasible=bool(pt["feasible"][0]),
        sigma_h_max=state.sigma_h_max if state.seen_feasible else None,
        trace=state.trace,
    )


def _island_task(args):
    return run_island(*args)


class _Islands:
    """Runs the islands of one generation, serially or in a process pool."""

    def __init__(self, worker_count):
        self.pool = ProcessPoolExecutor(worker_count) if worker_count > 1 else None

    def map(self, tasks):
        if self.pool is None:
            return [run_island(*t) for t in tasks]
        return list(self.pool.map(_island_task, tasks))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def solve(params, config, progress=None):
    """Co-evolve formation and velocity; return the best plan found.

    Parameters
    ----------
    params : ScenarioParams
    config : CoevolutionConfig
    progress : callable, optional
        Called as ``progress(row)`` with each outer trace row.

    Returns
    -------
    Solution
        ``feasible`` is False when no candidate met every constraint; the
        plan is then the least-violating one found.
    """
    config.validate()
    t0 = time.perf_counter()
    cap = config.sigma_h_cap
    outer_cfg = pso.PsoConfig(
        dimension=1, population=config.outer_population, iterations=config.outer_iterations,
        c1=config.c1, c2=config.c2, w_start=config.w_start, w_end=config.w_end,
        v_pso_max=config.v_pso_max, lower=params.v_min, upper=params.v_max,
        seed=np.random.SeedSequence(config.seed, spawn_key=(_OUTER_KEY,)), penalty_cap=cap,
    )
    shared = {"sigma_h_max": None, "generation": 0, "warm": [None] * config.outer_population}
    inner_traces = []
    rows = []
    islands = _Islands(config.worker_count)

    def outer_fitness(positions):
        k = shared["generation"]
        tasks = [
            (params, config.inner, float(positions[d, 0]), island_seed(config.seed, k, d),
             shared["sigma_h_max"], cap, shared["warm"][d] if config.warm_start else None)
            for d in range(len(positions))
        ]
        results = islands.map(tasks)
        # barrier: merge worst feasible sigma_h for the next generation
        observed = [r.sigma_h_max for r in results if r.sigma_h_max is not None]
        if observed:
            prev = shared["sigma_h_max"]
            shared["sigma_h_max"] = max(observed) if prev is None else max(prev, max(observed))
        shared["warm"] = [r.formation.ravel() for r in results]
        inner_traces[:] = [r.trace for r in results]
        objective = np.array([r.sigma_h for r in results])
        inner_ok = np.array([r.violation == 0 and np.isfinite(r.sigma_h) for r in results])
        power_ok = np.array([r.power_feasible for r in results])
        violation = np.array([r.violation + r.g["g10"] + r.g["g11"] for r in results])
        return pso.Evaluation(objective, violation, inner_ok & power_ok, pso.RowPayload(results))

    def record(state):
        best = state.global_eval.payload[0]
        row = {
            "generation": shared["generation"],
            "wall_time_s": time.perf_counter() - t0,
            "best_fitness": state.global_fitness,
            "feasible": bool(state.global_eval.feasible[0]),
            **best.g,
            "sigma_h": best.sigma_h,
            "v_y": best.v_y,
        }
        rows.append(row)
        if progress is not None:
            progress(row)
        log.debug("generation %d best %.6g feasible %s", row["generation"], row["best_fitness"], row["feasible"])

    try:
        state = pso.init(outer_cfg, outer_fitness)
        record(state)
        for k in range(1, config.outer_iterations + 1):
            shared["generation"] = k
            pso.step(state, outer_fitness, outer_cfg)
            record(state)
    finally:
        islands.close()

    best = state.global_eval.payload[0]
    return plan_solution(
        params, best.formation, best.v_y, state.global_fitness, rows, list(inner_traces),
        config.seed, time.perf_counter() - t0,
    )


def plan_solution(params, formation, v_y, fitness, outer_trace, inner_traces, seed, wall_time_s):
    """Wrap a best formation/velocity into a :class:`Solution` with its report."""
    plan = SwarmPlan(formation=formation, v_y=v_y, plan=comms.allocate_power(formation, v_y, params, strict=False))
    report = evaluate_plan(plan, params)
    if report.feasible:
        fitness = report.sigma_h
    return Solution(
        plan=plan, report=report, fitness=float(fitness), feasible=report.feasible,
        outer_trace=outer_trace, inner_traces=inner_traces, seed=seed, wall_time_s=wall_time_s,
    )


def with_budget(config, **changes):
    """Copy of ``config`` with outer fields and ``inner_*`` fields replaced."""
    inner = {k[len("inner_"):]: v for k, v in changes.items() if k.startswith("inner_")}
    outer = {k: v for k, v in changes.items() if not k.startswith("inner_")}
    return replace(config, inner=replace(config.inner, **inner), **outer)
