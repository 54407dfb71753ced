"""Air-to-ground offloading link, sensing data rate and energy accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SPEED_OF_LIGHT

__all__ = [
    "LinkError",
    "LinkState",
    "PowerPlan",
    "gs_distances",
    "required_rate",
    "min_tx_power",
    "throughput",
    "propulsion_power",
    "link_state",
    "power_budget",
    "allocate_power",
    "total_energy",
]


class LinkError(ValueError):
    pass


@dataclass(frozen=True)
class LinkState:
    """Distances, required rates and the minimum powers meeting them."""

    d: np.ndarray  # (I, N) UAV-GS distances
    r_min: np.ndarray  # (I,)
    eta: np.ndarray  # (I, N)


@dataclass(frozen=True)
class PowerPlan:
    p_com: np.ndarray  # (I, N) W
    feasible: bool
    g10: float = 0.0
    g11: float = 0.0


def slot_positions(v_y, params):
    """Along-track position of the swarm in every slot, starting at 0."""
    return np.arange(params.n_slots) * (v_y * params.delta_t)


def gs_distances(formation, v_y, params):
    """``(I, N)`` distances between each UAV and the ground station."""
    q = np.asarray(formation, dtype=float)
    y = slot_positions(v_y, params)
    dxz2 = (q[:, 0] - params.gs_x) ** 2 + (q[:, 1] - params.gs_z) ** 2
    d = np.sqrt(dxz2[:, None] + (y[None, :] - params.gs_y) ** 2)
    if np.any(d == 0):
        raise LinkError("UAV coincides with the ground station")
    return d


def required_rate(q_i, params, strict=True):
    """Raw radar data rate (bit/s) produced by a UAV at ``q_i = (x, z)``.

    Grows with the slant-range extent of the echo window across the beam.
    Broadcasts over leading axes of ``q_i``.  If the lower beam edge reaches
    the horizon the rate is unbounded: ``strict`` raises ``LinkError``,
    otherwise ``inf`` is returned for those entries.
    """
    q_i = np.asarray(q_i, dtype=float)
    x, z = q_i[..., 0], q_i[..., 1]
    theta = np.arctan((params.x_t - x) / z)
    half = params.beamwidth / 2.0
    horizon = theta + half >= np.pi / 2
    if strict and np.any(horizon):
        raise LinkError("lower beam edge at or beyond the horizon")
    with np.errstate(divide="ignore", invalid="ignore"):
        window = (SPEED_OF_LIGHT * params.tau_p
                  + z / np.cos(theta + half) - z / np.cos(theta - half))
    rate = params.n_bits * params.b_rg * params.prf / SPEED_OF_LIGHT * window
    rate = np.where(horizon, np.inf, rate)
    return rate if rate.ndim else float(rate)


def min_tx_power(d, r_min, b_c, beta_c):
    """Smallest transmit power reaching rate ``r_min`` at distance ``d``."""
    return np.asarray(d, dtype=float) ** 2 / beta_c * np.expm1(np.log(2.0) * np.asarray(r_min) / b_c)


def throughput(p, d, b_c, beta_c):
    """Free-space FDMA throughput in bit/s."""
    snr = np.asarray(p, dtype=float) * beta_c / np.asarray(d, dtype=float) ** 2
    return b_c * np.log1p(snr) / np.log(2.0)


def propulsion_power(v_y, params):
    """Rotary-wing propulsion power (W) at steady forward speed ``v_y``.

    Blade profile + induced + parasitic terms.
    """
    v = np.asarray(v_y, dtype=float)
    v2 = v * v
    v0 = params.prop_v0
    x = v2 / (2.0 * v0**2)
    # sqrt(1 + x^2) - x without cancellation at high speed
    induced = np.sqrt(1.0 / (np.hypot(1.0, x) + x))
    p = (params.prop_p0 * (1.0 + 3.0 * v2 / params.u_tip**2)
         + params.prop_pi * induced
         + 0.5 * params.prop_parasitic * v2 * v)
    return p if p.ndim else float(p)


def power_budget(v_y, params):
    """Per-UAV budget for summed communication power over the mission (W)."""
    n = params.n_slots
    return params.e_max / params.delta_t - n * propulsion_power(v_y, params) - n * params.p_rad


def link_state(formation, v_y, params, strict=True):
    """Distances, rates and minimum powers of one formation.

    With ``strict=False`` a UAV whose beam reaches the horizon gets an
    infinite rate and power instead of raising ``LinkError``.
    """
    q = np.asarray(formation, dtype=float)
    d = gs_distances(q, v_y, params)
    r_min = np.asarray(required_rate(q, params, strict=strict), dtype=float)
    with np.errstate(over="ignore"):
        eta = min_tx_power(d, r_min[:, None], params.b_c, params.beta_c)
    return LinkState(d=d, r_min=r_min, eta=eta)


def allocate_power(formation, v_y, params, link=None, strict=True):
    """Minimum-power allocation; feasible iff peak and energy caps both hold.

    The plan always carries ``p_com = eta``, the pointwise smallest powers
    meeting every slot's rate requirement.  When a cap fails the plan is
    flagged infeasible and ``g10``/``g11`` record the violation.  ``strict``
    is passed to :func:`link_state`.
    """
    link = link_state(formation, v_y, params, strict=strict) if link is None else link
    from .objective import power_violations

    g10, g11 = power_violations(link, v_y, params)
    budget = power_budget(v_y, params)
    feasible = bool(np.all(link.eta <= params.p_com_max) and np.all(link.eta.sum(axis=1) <= budget))
    p = link.eta.copy()
    p.setflags(write=False)
    return PowerPlan(p_com=p, feasible=feasible, g10=g10, g11=g11)


def total_energy(plan, v_y, params):
    """Energy (J) drawn by each UAV: propulsion + radar + offloading."""
    p_com = plan.p_com if isinstance(plan, PowerPlan) else np.asarray(plan, dtype=float)
    if p_com.shape != (params.n_uav, params.n_slots):
        raise ValueError(f"plan shape {p_com.shape} != {(params.n_uav, params.n_slots)}")
    t = params.mission_time
    return t * propulsion_power(v_y, params) + t * params.p_rad + params.delta_t * p_com.sum(axis=1)
