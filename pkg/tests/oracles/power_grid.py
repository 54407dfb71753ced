"""Grid-search feasibility oracle for the offloading power problem.

Decides whether some power matrix on a uniform grid over ``[0, P_max]``
meets the peak cap, every slot's rate requirement and the energy cap.  Only
the forward models are used: rates come from ``throughput`` and energy from
the raw per-UAV energy sum, never from the closed-form minimum powers.

The search over slot combinations is an exhaustive depth-first search with
two sound prunings: powers are non-negative, so a partial energy above the
cap (plus a lower bound for the remaining slots, read off the grid scan)
can never be completed.
"""

import numpy as np

from swarminsar import comms


def slot_levels(levels, d, r_min, params, rtol):
    """Boolean ``(N, G)``: grid level ``g`` meets the rate in slot ``n``."""
    rate = comms.throughput(levels[None, :], d[:, None], params.b_c, params.beta_c)
    return rate >= r_min * (1.0 - rtol)


def uav_feasible(levels, ok, fixed_energy, params):
    """Exhaustive DFS over grid combinations for one UAV."""
    n_slots = ok.shape[0]
    cap = params.e_max
    # smallest admissible level per slot, by scanning the grid
    cheapest = np.array([levels[row].min() if row.any() else np.inf for row in ok])
    if not np.all(np.isfinite(cheapest)):
        return False
    tail = np.concatenate([np.cumsum(cheapest[::-1])[::-1], [0.0]]) * params.delta_t

    def dfs(n, energy):
        if energy + tail[n] > cap:
            return False
        if n == n_slots:
            return energy <= cap
        for g in np.flatnonzero(ok[n]):
            if dfs(n + 1, energy + levels[g] * params.delta_t):
                return True
        return False

    return dfs(0, fixed_energy)


def grid_verdict(formation, v_y, params, n_levels, rtol=1e-9):
    levels = np.linspace(0.0, params.p_com_max, n_levels)
    d = comms.gs_distances(formation, v_y, params)
    r_min = np.asarray(comms.required_rate(formation, params, strict=False), dtype=float)
    t = params.n_slots * params.delta_t
    p_prop = comms.propulsion_power(v_y, params)
    for i in range(params.n_uav):
        fixed = t * p_prop + t * params.p_rad[i]
        ok = slot_levels(levels, d[i], r_min[i], params, rtol)
        if not uav_feasible(levels, ok, fixed, params):
            return False
    return True


def brute_force_feasible(formation, v_y, params, start=2, max_power=17):
    """Grid verdict with ``2**k + 1`` levels, refined until it settles.

    A feasible grid point is a certificate, so the search stops there;
    an infeasible verdict is refined up to ``2**max_power + 1`` levels (the
    peak cap itself is always a grid level, so only the energy sum can be
    rounded up, by at most one grid step per slot).

    Returns ``(verdict, n_levels)`` of the last grid searched.
    """
    for k in range(start, max_power + 1):
        n = 2**k + 1
        if grid_verdict(formation, v_y, params, n):
            return True, n
    return False, n


def random_instance(rng, max_uav=4, max_slots=8):
    """Small scenario, formation and velocity with a verdict that varies.

    The energy cap is drawn around the energy the minimum powers need, and
    the peak cap around their largest value, so both verdicts are common.
    """
    from swarminsar.params import ScenarioParams

    n_uav = int(rng.integers(2, max_uav + 1))
    n_slots = int(rng.integers(1, max_slots + 1))
    base = ScenarioParams(
        n_uav=n_uav, n_slots=n_slots, delta_t=float(rng.uniform(0.5, 2.0)),
        beta_c_db=float(rng.uniform(10.0, 30.0)), b_c=float(rng.uniform(2e6, 2e7)),
        gs_y=float(rng.uniform(0.0, 40.0)),
    )
    x = rng.uniform(-60.0, 0.0, n_uav)
    z = rng.uniform(30.0, 100.0, n_uav)
    formation = np.column_stack([x, z])
    v_y = float(rng.uniform(base.v_min, base.v_max))
    eta = comms.link_state(formation, v_y, base).eta
    peak = eta.max() * float(rng.choice([rng.uniform(0.8, 1.0), rng.uniform(1.0, 1.5)]))
    t = base.n_slots * base.delta_t
    fixed = t * comms.propulsion_power(v_y, base) + t * base.p_rad.max()
    comm = base.delta_t * eta.sum(axis=1).max()
    e_max = fixed + comm * float(rng.uniform(0.8, 1.2))
    params = base.replace(p_com_max_dbw=float(10 * np.log10(peak)), e_max_wh=e_max / 3600.0)
    return params, formation, v_y
