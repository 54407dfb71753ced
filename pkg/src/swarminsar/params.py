"""Scenario constants for a multi-UAV InSAR mission.

All user-facing values are stored in the units a mission file uses (dB, dBW,
degrees, Wh).  Linear SI quantities used by the model are derived once in
``__post_init__`` and stored alongside, so a ``ScenarioParams`` echoed back to
a mission file reproduces exactly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "ScenarioParams",
    "ScenarioError",
    "db_to_linear",
    "all_pairs",
]

SPEED_OF_LIGHT = 299_792_458.0
WH_TO_J = 3600.0


class ScenarioError(ValueError):
    """Invalid scenario value. ``key`` names the offending parameter."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def all_pairs(n_uav):
    """0-based index pairs (i, j), i < j, in lexicographic order."""
    return tuple(combinations(range(n_uav), 2))


@dataclass(frozen=True)
class ScenarioParams:
    """Physical, radar, link, energy and constraint constants.

    Defaults reproduce the reference mission (200 one-second slots, 5 UAVs,
    S-band radar at 2.5 GHz).  Angles are given in degrees and gains/powers in
    dB/dBW; the linear counterparts are available as derived attributes
    (``theta_min``, ``sigma0``, ``p_rad``, ...).

    Propulsion uses the rotary-wing model.  With ``propulsion_model="canonical"``
    the lumped constants ``p_0``, ``p_i``, ``v_0`` are used directly; with
    ``"blade"`` they are computed from the blade/rotor parameters
    (``delta_u``, ``omega``, ``rotor_radius``, ``w_u``, ``k_u``).
    """

    # geometry / timing
    n_uav: int = 5
    n_slots: int = 200
    delta_t: float = 1.0
    x_t: float = 20.0
    gs_x: float = 70.0
    gs_y: float = 150.0
    gs_z: float = 25.0
    # radar
    wavelength: float = 0.12
    f0: float = 2.5e9
    b_rg: float = 3.0e9
    beamwidth_deg: float = 40.0
    sigma0_db: float = -10.0
    g_t_dbi: float = 5.0
    g_r_dbi: float = 5.0
    tau_p: float = 1.0e-7
    prf: float = 1.0e3
    t_sys: float = 400.0
    f_db: float = 5.0
    l_db: float = 6.0
    k_b: float = 1.380649e-23
    gamma_other: float = 0.6
    n_looks: float = 4.0
    n_bits: float = 4.0
    p_rad_dbw: tuple = (15.0,)
    # communication
    b_c: float = 1.0e9
    beta_c_db: float = 20.0
    p_com_max_dbw: float = 9.0
    # energy
    e_max_wh: float = 83.33
    propulsion_model: str = "canonical"
    p_0: float = 79.86
    p_i: float = 88.63
    v_0: float = 4.03
    u_tip: float = 120.0
    d_0: float = 0.6
    rho: float = 1.225
    rotor_solidity: float = 0.05
    rotor_area: float = 0.503
    delta_u: float = 0.012
    omega: float = 300.0
    rotor_radius: float = 0.4
    w_u: float = 120.0
    k_u: float = 0.1
    # constraints
    z_min: float = 1.0
    z_max: float = 100.0
    theta_min_deg: float = 37.24
    theta_max_deg: float = 48.7
    v_min: float = 1.0
    v_max: float = 12.0
    d_min: float = 2.0
    c_min: float = 4.5e4
    h_amb_min: float = 1.2
    phase_pairs: tuple | None = None

    # derived (linear SI), filled in __post_init__
    beamwidth: float = field(init=False, repr=False)
    theta_min: float = field(init=False, repr=False)
    theta_max: float = field(init=False, repr=False)
    sigma0: float = field(init=False, repr=False)
    g_t: float = field(init=False, repr=False)
    g_r: float = field(init=False, repr=False)
    noise_figure: float = field(init=False, repr=False)
    losses: float = field(init=False, repr=False)
    p_rad: np.ndarray = field(init=False, repr=False, compare=False)
    beta_c: float = field(init=False, repr=False)
    p_com_max: float = field(init=False, repr=False)
    e_max: float = field(init=False, repr=False)
    bp: float = field(init=False, repr=False)
    prop_p0: float = field(init=False, repr=False)
    prop_pi: float = field(init=False, repr=False)
    prop_v0: float = field(init=False, repr=False)
    prop_parasitic: float = field(init=False, repr=False)
    pairs: tuple = field(init=False, repr=False)
    phase_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p_rad_dbw = self.p_rad_dbw
        if np.ndim(p_rad_dbw) == 0:
            p_rad_dbw = (float(p_rad_dbw),)
        object.__setattr__(self, "p_rad_dbw", tuple(float(v) for v in p_rad_dbw))
        if self.phase_pairs is not None:
            object.__setattr__(
                self, "phase_pairs", tuple(tuple(int(k) for k in pq) for pq in self.phase_pairs)
            )
        self.validate()

        def put(name, value):
            object.__setattr__(self, name, value)

        put("beamwidth", math.radians(self.beamwidth_deg))
        put("theta_min", math.radians(self.theta_min_deg))
        put("theta_max", math.radians(self.theta_max_deg))
        put("sigma0", float(db_to_linear(self.sigma0_db)))
        put("g_t", float(db_to_linear(self.g_t_dbi)))
        put("g_r", float(db_to_linear(self.g_r_dbi)))
        put("noise_figure", float(db_to_linear(self.f_db)))
        put("losses", float(db_to_linear(self.l_db)))
        p_rad = db_to_linear(np.asarray(self.p_rad_dbw, dtype=float))
        if p_rad.size == 1:
            p_rad = np.full(self.n_uav, float(p_rad[0]))
        p_rad.setflags(write=False)
        put("p_rad", p_rad)
        put("beta_c", float(db_to_linear(self.beta_c_db)))
        put("p_com_max", float(db_to_linear(self.p_com_max_dbw)))
        put("e_max", self.e_max_wh * WH_TO_J)
        put("bp", self.b_rg / self.f0)

        if self.propulsion_model == "canonical":
            p0, pi, v0 = self.p_0, self.p_i, self.v_0
        else:
            rho, s, area = self.rho, self.rotor_solidity, self.rotor_area
            p0 = self.delta_u / 8.0 * rho * s * area * self.omega**3 * self.rotor_radius**3
            pi = (1.0 + self.k_u) * self.w_u**1.5 / math.sqrt(2.0 * rho * area)
            v0 = math.sqrt(self.w_u / (2.0 * rho * area))
        put("prop_p0", p0)
        put("prop_pi", pi)
        put("prop_v0", v0)
        put("prop_parasitic", self.d_0 * self.rho * self.rotor_solidity * self.rotor_area)

        pairs = all_pairs(self.n_uav)
        put("pairs", pairs)
        if self.phase_pairs is None:
            mask = np.ones(len(pairs), dtype=bool)
        else:
            wanted = {(i - 1, j - 1) for i, j in self.phase_pairs}
            mask = np.array([pq in wanted for pq in pairs], dtype=bool)
        mask.setflags(write=False)
        put("phase_mask", mask)

    def validate(self):
        def positive(*names):
            for name in names:
                if not getattr(self, name) > 0:
                    raise ScenarioError(name, f"must be > 0, got {getattr(self, name)!r}")

        if int(self.n_uav) != self.n_uav or self.n_uav < 2:
            raise ScenarioError("n_uav", f"need at least 2 UAVs, got {self.n_uav!r}")
        if int(self.n_slots) != self.n_slots or self.n_slots < 1:
            raise ScenarioError("n_slots", f"must be a positive integer, got {self.n_slots!r}")
        positive("delta_t", "wavelength", "f0", "b_rg", "beamwidth_deg", "tau_p", "prf",
                 "t_sys", "k_b", "n_looks", "n_bits", "b_c", "u_tip", "rho",
                 "rotor_solidity", "rotor_area", "z_min", "d_min")
        for name in ("e_max_wh", "c_min", "h_amb_min", "d_0"):
            if getattr(self, name) < 0:
                raise ScenarioError(name, f"must be >= 0, got {getattr(self, name)!r}")
        if self.n_looks < 1:
            raise ScenarioError("n_looks", "need at least one look")
        if not 0 < self.gamma_other <= 1:
            raise ScenarioError("gamma_other", f"must lie in (0, 1], got {self.gamma_other!r}")
        if self.z_min > self.z_max:
            raise ScenarioError("z_min", f"z_min={self.z_min} exceeds z_max={self.z_max}")
        if not 0 < self.theta_min_deg <= self.theta_max_deg < 90:
            raise ScenarioError(
                "theta_min_deg",
                f"need 0 < theta_min <= theta_max < 90 deg, got {self.theta_min_deg}, {self.theta_max_deg}",
            )
        if self.v_min > self.v_max:
            raise ScenarioError("v_min", f"v_min={self.v_min} exceeds v_max={self.v_max}")
        if self.v_min < 0:
            raise ScenarioError("v_min", "swarm velocity cannot be negative")
        if len(self.p_rad_dbw) not in (1, self.n_uav):
            raise ScenarioError("p_rad_dbw", f"expected 1 or {self.n_uav} values, got {len(self.p_rad_dbw)}")
        if self.propulsion_model not in ("canonical", "blade"):
            raise ScenarioError("propulsion_model", f"unknown model {self.propulsion_model!r}")
        if self.propulsion_model == "canonical":
            positive("p_0", "v_0")
            if self.p_i < 0:
                raise ScenarioError("p_i", "must be >= 0")
        else:
            positive("delta_u", "omega", "rotor_radius", "w_u")
        if self.phase_pairs is not None:
            seen = set()
            for pq in self.phase_pairs:
                if len(pq) != 2 or not 1 <= pq[0] < pq[1] <= self.n_uav:
                    raise ScenarioError("phase_pairs", f"invalid pair {pq!r} for {self.n_uav} UAVs")
                seen.add(tuple(pq))
            if not seen:
                raise ScenarioError("phase_pairs", "empty pair set; omit the key to use all pairs")

    @property
    def mission_time(self):
        return self.n_slots * self.delta_t

    def replace(self, **changes):
        """Copy with some config-level fields changed (derived values recomputed)."""
        return dataclasses.replace(self, **changes)

    def config_items(self):
        """Config-level (init) fields as an ordered ``{name: value}`` dict."""
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}
