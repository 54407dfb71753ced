"""Closed-form InSAR sensing model for a UAV formation.

Every function is pure and broadcasts over leading axes, so the same code
evaluates one formation (shape ``(I, 2)``) or a particle batch
(``(P, I, 2)``).  Positions are across-track ``(x, z)`` pairs in metres and
angles are radians throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SPEED_OF_LIGHT

__all__ = [
    "ModelDomainError",
    "PairMetrics",
    "look_angle_and_range",
    "baseline_geometry",
    "swath_and_coverage",
    "snr",
    "coherence",
    "hoa",
    "pair_height_error",
    "fused_height_error",
    "pair_metrics",
]

_ANGLE_EPS = 1e-6


class ModelDomainError(ValueError):
    """Input outside the domain where the closed forms are defined."""


@dataclass(frozen=True)
class PairMetrics:
    i: int
    j: int
    b: float
    alpha: float
    b_perp: float
    gamma_snr: float
    gamma_rg: float
    gamma: float
    h_amb: float
    sigma_phi: float
    sigma_h_pair: float

    def as_dict(self):
        return dict(self.__dict__)


def look_angle_and_range(q, x_t):
    """Look angle and slant range of UAV(s) at ``q = (..., [x, z])``.

    The beam is steered so that the footprint is centred on the target line
    at range coordinate ``x_t``.
    """
    q = np.asarray(q, dtype=float)
    x, z = q[..., 0], q[..., 1]
    if np.any(z <= 0):
        raise ModelDomainError("altitude must be strictly positive")
    dx = x_t - x
    theta = np.arctan(dx / z)
    r = np.sqrt(dx * dx + z * z)
    return theta, r


def _baseline(qi, qj, theta_i):
    dx = qj[..., 0] - qi[..., 0]
    dz = qj[..., 1] - qi[..., 1]
    b = np.hypot(dx, dz)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.arctan(dz / dx)
    # vertical baseline -> +-pi/2, coincident sensors -> 0
    alpha = np.where(dx == 0, np.where(dz == 0, 0.0, np.copysign(np.pi / 2, dz)), alpha)
    # magnitude of the projection orthogonal to U_i's line of sight
    b_perp = np.abs(b * np.cos(theta_i - alpha))
    return b, alpha, b_perp


def baseline_geometry(q_i, q_j, x_t):
    """Baseline length, tilt against the horizontal and perpendicular baseline.

    Returns
    -------
    b, alpha, b_perp
        ``b_perp`` is the (non-negative) magnitude of the baseline projected
        orthogonally to the line of sight of ``q_i``.
    """
    q_i = np.asarray(q_i, dtype=float)
    q_j = np.asarray(q_j, dtype=float)
    theta_i, _ = look_angle_and_range(q_i, x_t)
    return _baseline(q_i, q_j, theta_i)


def _check_angles(theta, low=_ANGLE_EPS):
    if np.any(theta <= low) or np.any(theta >= np.pi / 2 - _ANGLE_EPS):
        raise ModelDomainError("look angle must lie inside (0, pi/2)")


def swath_and_coverage(formation, v_y, params):
    """Per-UAV swath width and total covered area ``N * min(S) * v_y * dt``."""
    theta, r = look_angle_and_range(formation, params.x_t)
    if np.any(theta >= np.pi / 2 - _ANGLE_EPS):
        raise ModelDomainError("look angle too close to the horizon")
    swath = params.beamwidth * r / np.cos(theta)
    c_tot = params.n_slots * swath.min(axis=-1) * np.asarray(v_y) * params.delta_t
    return swath, c_tot


def _link_factor(params):
    """SNR numerator over the velocity/geometry-free part of the denominator."""
    num = (params.sigma0 * params.g_t * params.g_r * params.wavelength**3
           * SPEED_OF_LIGHT * params.tau_p * params.prf)
    den = (4.0**4 * np.pi**3 * params.k_b * params.t_sys * params.b_rg
           * params.noise_figure * params.losses)
    return num / den


def _snr(theta, r, v_y, params):
    # master is mono-static (r_1^3); slaves bistatic with r_1^2 * r_i
    geom = r[..., :1] ** 2 * r * np.sin(theta)
    v = np.asarray(v_y, dtype=float)[..., None] if np.ndim(v_y) else v_y
    return _link_factor(params) * params.p_rad / (v * geom)


def snr(formation, v_y, params):
    """Received SNR of each UAV (index 0 is the transmitting master)."""
    theta, r = look_angle_and_range(formation, params.x_t)
    _check_angles(theta)
    if np.any(np.asarray(v_y) <= 0):
        raise ModelDomainError("swarm velocity must be > 0")
    return _snr(theta, r, v_y, params)


def _coherence(theta_i, theta_j, snr_i, snr_j, bp, gamma_other):
    gamma_snr = 1.0 / np.sqrt((1.0 + 1.0 / snr_i) * (1.0 + 1.0 / snr_j))
    chi = np.sin(np.maximum(theta_i, theta_j)) / (0.5 * (np.sin(theta_i) + np.sin(theta_j)))
    gamma_rg = ((2.0 + bp) / (1.0 + chi) - (2.0 - bp) / (1.0 + 1.0 / chi)) / bp
    return gamma_snr, gamma_rg, gamma_rg * gamma_snr * gamma_other


def coherence(theta_i, theta_j, snr_i, snr_j, params=None, *, bp=None, gamma_other=None):
    """SNR, baseline (range spectral) and total coherence of a pair.

    ``bp`` (fractional bandwidth) and ``gamma_other`` default to the values
    in ``params``.
    """
    bp = params.bp if bp is None else bp
    gamma_other = params.gamma_other if gamma_other is None else gamma_other
    if np.any(np.asarray(snr_i) <= 0) or np.any(np.asarray(snr_j) <= 0):
        raise ModelDomainError("SNR must be > 0")
    _check_angles(np.asarray(theta_i, dtype=float), 0.0)
    _check_angles(np.asarray(theta_j, dtype=float), 0.0)
    return _coherence(theta_i, theta_j, snr_i, snr_j, bp, gamma_other)


def hoa(theta_i, r_i, b_perp, wavelength):
    """Height of ambiguity; ``inf`` for a zero perpendicular baseline."""
    b_perp = np.asarray(b_perp, dtype=float)
    with np.errstate(divide="ignore"):
        h = wavelength * r_i * np.sin(theta_i) / b_perp
    h = np.where(b_perp == 0, np.inf, h)
    return h if h.ndim else float(h)


def _sigma_phi(gamma, n_looks):
    return np.sqrt((1.0 - gamma * gamma) / (2.0 * n_looks)) / gamma


def pair_height_error(gamma, n_looks, h_amb):
    """Phase standard deviation (Cramer-Rao) and the resulting height error."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0) or np.any(gamma > 1):
        raise ModelDomainError("coherence must lie in (0, 1]")
    if n_looks < 1:
        raise ModelDomainError("need at least one look")
    sigma_phi = _sigma_phi(gamma, n_looks)
    h_amb = np.asarray(h_amb, dtype=float)
    with np.errstate(invalid="ignore"):
        sigma_h = np.where(np.isinf(h_amb), np.inf, h_amb * sigma_phi / (2.0 * np.pi))
    if sigma_h.ndim == 0:
        return float(sigma_phi), float(sigma_h)
    return sigma_phi, sigma_h


def _fuse(sigma_pairs, axis=-1):
    with np.errstate(divide="ignore"):
        info = np.sum(1.0 / (sigma_pairs * sigma_pairs), axis=axis)
        return 1.0 / np.sqrt(info)


def fused_height_error(sigma_pairs):
    """Height error of the inverse-variance weighted DEM.

    Pairs with infinite error get zero weight; a pair with zero error makes
    the fused error zero.
    """
    s = np.asarray(sigma_pairs, dtype=float)
    if s.size == 0:
        raise ModelDomainError("no pairs to fuse")
    if np.any(s < 0):
        raise ModelDomainError("pair errors must be non-negative")
    out = _fuse(s)
    return out if out.ndim else float(out)


def pair_terms(q, v_y, params):
    """Vectorised pair quantities for formations ``q`` of shape ``(..., I, 2)``.

    No domain checks: callers guarantee ``z > 0`` and ``x < x_t`` (the search
    box does).  Returns a dict of arrays with a trailing pair axis, plus the
    per-UAV ``theta``, ``r``, ``snr``.
    """
    iu, ju = np.triu_indices(params.n_uav, k=1)
    dx = params.x_t - q[..., 0]
    z = q[..., 1]
    theta = np.arctan(dx / z)
    r = np.sqrt(dx * dx + z * z)
    s = _snr(theta, r, v_y, params)
    qi, qj = q[..., iu, :], q[..., ju, :]
    ti, tj = theta[..., iu], theta[..., ju]
    b, alpha, b_perp = _baseline(qi, qj, ti)
    g_snr, g_rg, gamma = _coherence(ti, tj, s[..., iu], s[..., ju], params.bp, params.gamma_other)
    with np.errstate(divide="ignore", invalid="ignore"):
        h_amb = np.where(b_perp > 0, params.wavelength * r[..., iu] * np.sin(ti) / b_perp, np.inf)
        sigma_phi = _sigma_phi(gamma, params.n_looks)
        sigma_h_pair = np.where(np.isinf(h_amb), np.inf, h_amb * sigma_phi / (2.0 * np.pi))
    return {
        "theta": theta, "r": r, "snr": s,
        "b": b, "alpha": alpha, "b_perp": b_perp,
        "gamma_snr": g_snr, "gamma_rg": g_rg, "gamma": gamma,
        "h_amb": h_amb, "sigma_phi": sigma_phi, "sigma_h_pair": sigma_h_pair,
    }


def pair_metrics(formation, v_y, params):
    """``PairMetrics`` for every pair of a single formation (1-based indices)."""
    q = np.asarray(formation, dtype=float)
    look_angle_and_range(q, params.x_t)
    terms = pair_terms(q, v_y, params)
    out = []
    for k, (i, j) in enumerate(params.pairs):
        out.append(PairMetrics(
            i + 1, j + 1,
            *(float(terms[name][k]) for name in (
                "b", "alpha", "b_perp", "gamma_snr", "gamma_rg", "gamma",
                "h_amb", "sigma_phi", "sigma_h_pair")),
        ))
    return out
