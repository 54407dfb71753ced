"""Particle swarm engine with reflecting walls and a non-parameterised penalty.

The fitness callable receives the ``(D, dim)`` position matrix and returns
either a plain array (unconstrained problems) or an :class:`Evaluation`
carrying objective, total violation and feasibility per particle.  Penalised
fitness is then ``objective`` for feasible particles and
``sigma_h_max + violation`` otherwise, where ``sigma_h_max`` is the worst
feasible objective seen so far (or ``penalty_cap`` before any).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Evaluation",
    "RowPayload",
    "PsoConfig",
    "PsoState",
    "TraceRow",
    "inertia",
    "init",
    "step",
    "run",
]


@dataclass
class Evaluation:
    objective: np.ndarray
    violation: np.ndarray
    feasible: np.ndarray
    payload: object = None  # optional RowPayload of per-particle solver data

    @classmethod
    def unconstrained(cls, values):
        values = np.asarray(values, dtype=float)
        return cls(values, np.zeros_like(values), np.ones(values.shape, dtype=bool))

    def take(self, idx):
        payload = None if self.payload is None else self.payload.take(idx)
        return Evaluation(self.objective[idx], self.violation[idx], self.feasible[idx], payload)


class RowPayload:
    """Per-particle objects carried alongside an :class:`Evaluation`."""

    def __init__(self, items):
        self.items = np.empty(len(items), dtype=object)
        self.items[:] = list(items)

    def take(self, idx):
        return RowPayload(self.items[idx])

    def merge(self, new, better):
        return RowPayload(np.where(better, new.items, self.items))

    def __getitem__(self, k):
        return self.items[k]

    def __len__(self):
        return len(self.items)


@dataclass
class PsoConfig:
    dimension: int
    population: int = 100
    iterations: int = 100
    c1: float = 2.5
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_pso_max: float = 1.0
    lower: np.ndarray = None
    upper: np.ndarray = None
    seed: object = None
    penalty_cap: float = 10.0

    def __post_init__(self):
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,)).copy()
        self.validate()

    def validate(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.population < 1:
            raise ValueError(f"population must be >= 1, got {self.population}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.w_end <= self.w_start <= 1:
            raise ValueError(f"need 0 <= w_end <= w_start <= 1, got {self.w_start}, {self.w_end}")
        if self.v_pso_max < 0:
            raise ValueError("v_pso_max must be >= 0")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")


@dataclass
class TraceRow:
    iteration: int
    best_fitness: float
    best_objective: float
    feasible: bool
    violation: float
    sigma_h_max: float


@dataclass
class PsoState:
    positions: np.ndarray
    velocities: np.ndarray
    rng: np.random.Generator
    local_best: np.ndarray = None
    local_eval: Evaluation = None
    global_best: np.ndarray = None
    global_eval: Evaluation = None  # single-row evaluation
    iteration: int = 0
    sigma_h_max: float = 10.0
    seen_feasible: bool = False
    trace: list = field(default_factory=list)

    @property
    def local_fitness(self):
        e = self.local_eval
        return np.where(e.feasible, e.objective, self.sigma_h_max + e.violation)

    @property
    def global_fitness(self):
        e = self.global_eval
        return float(np.where(e.feasible, e.objective, self.sigma_h_max + e.violation)[0])


def inertia(k, config):
    """Inertia weight of update ``k`` (1-based), linear from w_start to w_end."""
    if config.iterations == 1:
        return config.w_start
    return config.w_start + (config.w_end - config.w_start) * (k - 1) / (config.iterations - 1)


def _evaluate(fitness_fn, positions, state):
    ev = fitness_fn(positions)
    if not isinstance(ev, Evaluation):
        ev = Evaluation.unconstrained(ev)
    ok = ev.feasible & np.isfinite(ev.objective)
    if np.any(ok):
        worst = float(np.max(ev.objective[ok]))
        state.sigma_h_max = worst if not state.seen_feasible else max(state.sigma_h_max, worst)
        state.seen_feasible = True
    return ev


def _record(state):
    e = state.global_eval
    state.trace.append(TraceRow(
        iteration=state.iteration,
        best_fitness=state.global_fitness,
        best_objective=float(e.objective[0]),
        feasible=bool(e.feasible[0]),
        violation=float(e.violation[0]),
        sigma_h_max=state.sigma_h_max,
    ))


def _merge(old, new, better):
    objective = np.where(better, new.objective, old.objective)
    violation = np.where(better, new.violation, old.violation)
    feasible = np.where(better, new.feasible, old.feasible)
    payload = old.payload
    if payload is not None:
        payload = payload.merge(new.payload, better)
    return Evaluation(objective, violation, feasible, payload)


def _update_bests(state, ev):
    cap = state.sigma_h_max
    fit = np.where(ev.feasible, ev.objective, cap + ev.violation)
    if state.local_eval is None:
        state.local_best = state.positions.copy()
        state.local_eval = ev
    else:
        better = fit < state.local_fitness
        state.local_best = np.where(better[:, None], state.positions, state.local_best)
        state.local_eval = _merge(state.local_eval, ev, better)
    lf = state.local_fitness
    k = int(np.argmin(lf))
    if state.global_eval is None or lf[k] < state.global_fitness:
        state.global_best = state.local_best[k].copy()
        state.global_eval = state.local_eval.take(np.array([k]))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def init(config, fitness_fn=None, positions=None, sigma_h_max=None):
    """Uniform positions in the box, velocities in ``[0, v_pso_max]``.

    ``positions`` (rows clipped into the box) replace the first rows of the
    random population, e.g. to warm-start from a previous best.  The random
    draws happen regardless so the stream does not depend on it.
    ``sigma_h_max`` seeds the penalty level with a worst feasible objective
    observed elsewhere.
    """
    rng = _as_rng(config.seed)
    shape = (config.population, config.dimension)
    start = rng.uniform(config.lower, config.upper, size=shape)
    velocities = rng.uniform(0.0, config.v_pso_max, size=shape)
    if positions is not None:
        rows = np.atleast_2d(np.asarray(positions, dtype=float))[: config.population]
        start[: len(rows)] = np.clip(rows, config.lower, config.upper)
    state = PsoState(positions=start, velocities=velocities, rng=rng, sigma_h_max=config.penalty_cap)
    if sigma_h_max is not None:
        state.sigma_h_max = float(sigma_h_max)
        state.seen_feasible = True
    if fitness_fn is not None:
        ev = _evaluate(fitness_fn, state.positions, state)
        _update_bests(state, ev)
        _record(state)
    return state


def reflect(positions, velocities, lower, upper):
    """Negate velocity components whose move would leave the box, then move.

    A reflected move that still leaves the box (velocity larger than the box)
    is clamped to the wall with that velocity component zeroed.
    """
    tentative = positions + velocities
    out = (tentative < lower) | (tentative > upper)
    velocities = np.where(out, -velocities, velocities)
    moved = positions + velocities
    still = (moved < lower) | (moved > upper)
    if np.any(still):
        moved = np.clip(moved, lower, upper)
        velocities = np.where(still, 0.0, velocities)
    return moved, velocities


def step(state, fitness_fn, config):
    """One velocity/position update followed by evaluation and best tracking."""
    k = state.iteration + 1
    w = inertia(k, config)
    n = config.population
    r1 = state.rng.random((n, 1))
    r2 = state.rng.random((n, 1))
    p = state.positions
    v = (w * state.velocities
         + config.c1 * r1 * (state.local_best - p)
         + config.c2 * r2 * (state.global_best[None, :] - p))
    state.positions, state.velocities = reflect(p, v, config.lower, config.upper)
    state.iteration = k
    ev = _evaluate(fitness_fn, state.positions, state)
    _update_bests(state, ev)
    _record(state)
    return state


def run(config, fitness_fn, positions=None, sigma_h_max=None):
    """Initialise and perform ``config.iterations`` updates.

    Returns
    -------
    best_position, best_fitness, state
        ``state.trace`` holds one :class:`TraceRow` per evaluation round,
        starting with the initial population (iteration 0).
    """
    state = init(config, fitness_fn, positions=positions, sigma_h_max=sigma_h_max)
    for _ in range(config.iterations):
        step(state, fitness_fn, config)
    return state.global_best.copy(), state.global_fitness, state
