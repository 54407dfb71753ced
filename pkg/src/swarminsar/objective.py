"""Constraint violations, penalised fitness and solution reports.

The batch functions (``formation_terms``, ``power_terms``) are the single
evaluation path shared by all solvers; ``evaluate_plan`` calls them with a
batch of one, so reports and fitness values agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import comms
from .model import PairMetrics, pair_metrics, pair_terms

__all__ = [
    "SIGMA_H_CAP",
    "SwarmPlan",
    "ConstraintReport",
    "formation_bounds",
    "formation_terms",
    "power_terms",
    "joint_terms",
    "joint_bounds",
    "formation_violations",
    "power_violations",
    "penalised",
    "fitness_formation",
    "fitness_outer",
    "outer_particle",
    "evaluate_plan",
    "check_constraints",
]

SIGMA_H_CAP = 10.0
FORMATION_G = ("g2", "g5", "g6", "g7", "g8")
POWER_G = ("g10", "g11")


@dataclass(frozen=True)
class SwarmPlan:
    formation: np.ndarray  # (I, 2)
    v_y: float
    plan: comms.PowerPlan


@dataclass(frozen=True)
class ConstraintReport:
    g2: float
    g5: float
    g6: float
    g7: float
    g8: float
    g10: float
    g11: float
    feasible: bool
    sigma_h: float
    per_pair: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def g(self):
        return {name: getattr(self, name) for name in FORMATION_G + POWER_G}

    @property
    def violation(self):
        return float(sum(self.g.values()))


def formation_bounds(params):
    """Search box for the interleaved ``(x_1, z_1, ..., x_I, z_I)`` vector.

    The x-range is the widest one compatible with the altitude and look-angle
    limits; points inside the box can still violate the look-angle limits.
    """
    x_min = params.x_t - params.z_max * np.tan(params.theta_max)
    x_max = params.x_t - params.z_min * np.tan(params.theta_min)
    lo = np.tile([x_min, params.z_min], params.n_uav)
    hi = np.tile([x_max, params.z_max], params.n_uav)
    return lo, hi


def _hinge(x):
    return np.maximum(x, 0.0)


def formation_terms(q, v_y, params):
    """Fused height error and formation-side violations for a batch.

    Parameters
    ----------
    q : ndarray, shape (P, I, 2)
    v_y : float or ndarray, shape (P,)

    Returns
    -------
    dict with ``sigma_h`` and ``g2, g5, g6, g7, g8`` arrays of shape (P,),
    and the raw pair terms under ``"pairs"``.

    Notes
    -----
    The rate requirement is checked against the minimum-power allocation
    (which meets every rate exactly), so ``g8`` is zero for any formation
    with finite ground-station distances.
    """
    t = pair_terms(q, v_y, params)
    theta = t["theta"]
    g2 = np.sum(_hinge(params.theta_min - theta) + _hinge(theta - params.theta_max), axis=-1)
    g5 = np.sum(_hinge(params.d_min - t["b"]), axis=-1)
    swath = params.beamwidth * t["r"] / np.cos(theta)
    c_tot = params.n_slots * swath.min(axis=-1) * v_y * params.delta_t
    g6 = _hinge(params.c_min - c_tot)
    g7 = np.sum(_hinge(params.h_amb_min - t["h_amb"]) * params.phase_mask, axis=-1)
    g8 = np.zeros_like(g6)
    with np.errstate(divide="ignore"):
        sigma_h = 1.0 / np.sqrt(np.sum(1.0 / t["sigma_h_pair"] ** 2, axis=-1))
    return {"sigma_h": sigma_h, "g2": g2, "g5": g5, "g6": g6, "g7": g7, "g8": g8,
            "c_tot": c_tot, "swath": swath, "pairs": t}


def power_terms(q, v_y, params):
    """Minimum powers and peak/energy cap violations for a batch.

    Returns ``eta`` of shape (P, I, N), ``g10``, ``g11`` and the boolean
    ``feasible`` (both caps hold) of shape (P,).
    """
    v_y = np.broadcast_to(np.asarray(v_y, dtype=float), q.shape[:1])
    y = np.arange(params.n_slots)[None, :] * (v_y[:, None] * params.delta_t)  # (P, N)
    dxz2 = (q[..., 0] - params.gs_x) ** 2 + (q[..., 1] - params.gs_z) ** 2  # (P, I)
    d2 = dxz2[..., None] + ((y - params.gs_y) ** 2)[:, None, :]
    r_min = comms.required_rate(q, params, strict=False)
    with np.errstate(over="ignore", invalid="ignore"):
        eta = d2 / params.beta_c * np.expm1(np.log(2.0) * r_min / params.b_c)[..., None]
    budget = comms.power_budget(v_y[:, None], params)  # (P, I)
    g10 = np.sum(_hinge(eta - params.p_com_max), axis=(-2, -1))
    # per-slot hinge against the whole-mission budget, as in the penalty definition
    g11 = np.sum(_hinge(eta - budget[..., None]), axis=(-2, -1))
    feasible = np.all(eta <= params.p_com_max, axis=(-2, -1)) & np.all(eta.sum(axis=-1) <= budget, axis=-1)
    return {"eta": eta, "g10": g10, "g11": g11, "feasible": feasible, "budget": budget}


def joint_terms(x, params):
    """Composed penalty terms for flattened ``[x_1, z_1, ..., x_I, z_I, v_y]`` rows.

    Infeasible candidates are charged the sum of every violation term, so
    neither a small formation shortfall nor a small power overshoot can hide
    a large violation of the other kind.  Beams reaching the horizon give
    infinite power terms and rank last.

    Returns
    -------
    objective, violation, feasible : ndarray, shape (P,)
    ft, pt : dict
        The underlying ``formation_terms`` and ``power_terms`` outputs.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    q = x[:, :-1].reshape(len(x), params.n_uav, 2)
    v_y = x[:, -1]
    ft = formation_terms(q, v_y, params)
    pt = power_terms(q, v_y, params)
    g_form = ft["g2"] + ft["g5"] + ft["g6"] + ft["g7"] + ft["g8"]
    power_ok = pt["feasible"]
    violation = g_form + pt["g10"] + pt["g11"]
    feasible = power_ok & (g_form == 0) & np.isfinite(ft["sigma_h"])
    return ft["sigma_h"], violation, feasible, ft, pt


def joint_bounds(params):
    """Search box of the flattened formation + velocity vector."""
    lo, hi = formation_bounds(params)
    return np.append(lo, params.v_min), np.append(hi, params.v_max)


def formation_violations(formation, v_y, params, plan=None, rate_rtol=1e-9):
    """``(g2, g5, g6, g7, g8)`` for one formation.

    With ``plan=None`` the minimum-power allocation is assumed (``g8 = 0``);
    an explicit ``(I, N)`` power matrix is checked slot by slot, with
    ``rate_rtol`` relative slack as in :func:`check_constraints`.
    """
    q = np.asarray(formation, dtype=float)[None]
    t = formation_terms(q, v_y, params)
    g8 = 0.0
    if plan is not None:
        p = plan.p_com if isinstance(plan, comms.PowerPlan) else np.asarray(plan, dtype=float)
        d = comms.gs_distances(q[0], v_y, params)
        r_min = np.asarray(comms.required_rate(q[0], params))
        rate = comms.throughput(p, d, params.b_c, params.beta_c)
        g8 = float(np.sum(_hinge(r_min[:, None] * (1.0 - rate_rtol) - rate)))
    return (float(t["g2"][0]), float(t["g5"][0]), float(t["g6"][0]), float(t["g7"][0]), g8)


def power_violations(link, v_y, params):
    """``(g10, g11)`` from the minimum powers of a ``LinkState``."""
    eta = link.eta
    budget = comms.power_budget(v_y, params)
    g10 = float(np.sum(_hinge(eta - params.p_com_max)))
    g11 = float(np.sum(_hinge(eta - np.asarray(budget)[:, None])))
    return g10, g11


def penalised(objective, violation, feasible, sigma_h_max):
    """Non-parameterised penalty: feasible -> objective, else worst + violation."""
    return np.where(feasible, objective, sigma_h_max + violation)


def fitness_formation(candidate, outer, sigma_h_max, params):
    """Formation fitness for a fixed ``outer = (v_y, plan)``.

    ``plan`` may be ``None`` (minimum-power allocation) or an ``(I, N)`` matrix.
    """
    v_y, plan = outer
    q = np.asarray(candidate, dtype=float).reshape(params.n_uav, 2)
    if np.any(q[:, 1] <= 0) or np.any(q[:, 0] >= params.x_t):
        return float("inf")
    g = formation_violations(q, v_y, params, plan=plan)
    if sum(g) == 0:
        return float(formation_terms(q[None], v_y, params)["sigma_h"][0])
    return float(sigma_h_max + sum(g))


def outer_particle(v_y, eta):
    """Outer particle layout: ``[v_y, P_1[1..N], ..., P_I[1..N]]``."""
    return np.concatenate(([float(v_y)], np.asarray(eta, dtype=float).ravel()))


def fitness_outer(particle, inner_best_fitness, params, sigma_h_max=SIGMA_H_CAP):
    """Velocity/power fitness given the associated best formation fitness."""
    particle = np.asarray(particle, dtype=float)
    v_y = particle[0]
    p = particle[1:].reshape(params.n_uav, params.n_slots)
    budget = comms.power_budget(v_y, params)
    g10 = float(np.sum(_hinge(p - params.p_com_max)))
    g11 = float(np.sum(_hinge(p - np.asarray(budget)[:, None])))
    feasible = bool(np.all(p <= params.p_com_max) and np.all(p.sum(axis=1) <= budget))
    if feasible:
        return float(inner_best_fitness)
    return float(sigma_h_max + g10 + g11)


def check_constraints(formation, v_y, p_com, params, rate_rtol=1e-9):
    """Independent check of every mission constraint from raw definitions.

    Returns ``{"C1": bool, ..., "C9": bool}``.  The rate check allows
    ``rate_rtol`` relative slack because the minimum-power allocation meets
    the rate with equality.
    """
    q = np.asarray(formation, dtype=float)
    p_com = np.asarray(p_com, dtype=float)
    x, z = q[:, 0], q[:, 1]
    theta = np.arctan((params.x_t - x) / z)
    flags = {
        "C1": bool(np.all((z >= params.z_min) & (z <= params.z_max))),
        "C2": bool(np.all((theta >= params.theta_min) & (theta <= params.theta_max))),
        "C3": bool(params.v_min <= v_y <= params.v_max),
        "C4": bool(np.all((p_com >= 0) & (p_com <= params.p_com_max))),
    }
    metrics = pair_metrics(q, v_y, params)
    flags["C5"] = all(m.b >= params.d_min for m in metrics)
    r = np.hypot(params.x_t - x, z)
    c_tot = params.n_slots * np.min(params.beamwidth * r / np.cos(theta)) * v_y * params.delta_t
    flags["C6"] = bool(c_tot >= params.c_min)
    flags["C7"] = all(
        m.h_amb >= params.h_amb_min for m, on in zip(metrics, params.phase_mask) if on
    )
    d = comms.gs_distances(q, v_y, params)
    rate = comms.throughput(p_com, d, params.b_c, params.beta_c)
    r_min = np.asarray(comms.required_rate(q, params, strict=False))[:, None]
    flags["C8"] = bool(np.all(np.isfinite(r_min)) and np.all(rate >= r_min * (1.0 - rate_rtol)))
    energy = comms.total_energy(p_com, v_y, params)
    flags["C9"] = bool(np.all(energy <= params.e_max))
    return flags


def evaluate_plan(plan, params):
    """Full ``ConstraintReport`` for a ``SwarmPlan``."""
    q = np.asarray(plan.formation, dtype=float)
    ft = formation_terms(q[None], plan.v_y, params)
    pt = power_terms(q[None], plan.v_y, params)
    g = {name: float(ft[name][0]) for name in FORMATION_G}
    g.update(g10=float(pt["g10"][0]), g11=float(pt["g11"][0]))
    sigma_h = float(ft["sigma_h"][0])
    feasible = bool(all(v == 0 for v in g.values()) and pt["feasible"][0] and np.isfinite(sigma_h))
    flags = check_constraints(q, plan.v_y, plan.plan.p_com, params)
    per_pair: list[PairMetrics] = pair_metrics(q, plan.v_y, params)
    return ConstraintReport(**g, feasible=feasible, sigma_h=sigma_h, per_pair=per_pair, flags=flags)
