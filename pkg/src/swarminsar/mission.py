"""Mission files, solver settings, trace CSVs and solution reports.

A mission file is INI text with flat ``key = value`` sections::

    [geometry]
    I = 5
    [constraints]
    h_amb_min = 1.2
    [solver]
    D2 = 16

Missing keys take the reference defaults; unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from . import comms
from .baselines import GaConfig, SaConfig
from .coevolution import CoevolutionConfig, InnerConfig
from .params import ScenarioError, ScenarioParams

__all__ = [
    "ScenarioParseError",
    "SolverSettings",
    "SECTIONS",
    "ALIASES",
    "TRACE_COLUMNS",
    "load_config",
    "load_scenario",
    "parse_config",
    "apply_overrides",
    "scenario_to_ini",
    "write_trace",
    "solution_to_dict",
    "write_solution",
]

TRACE_COLUMNS = (
    "generation", "wall_time_s", "best_fitness", "feasible",
    "g2", "g5", "g6", "g7", "g8", "g10", "g11", "sigma_h", "v_y",
)

SECTIONS = {
    "geometry": ("n_uav", "n_slots", "delta_t", "x_t", "gs_x", "gs_y", "gs_z"),
    "radar": ("wavelength", "f0", "b_rg", "beamwidth_deg", "sigma0_db", "g_t_dbi", "g_r_dbi",
              "tau_p", "prf", "t_sys", "f_db", "l_db", "k_b", "gamma_other", "n_looks",
              "n_bits", "p_rad_dbw", "phase_pairs"),
    "comms": ("b_c", "beta_c_db", "p_com_max_dbw"),
    "energy": ("e_max_wh", "propulsion_model", "p_0", "p_i", "v_0", "u_tip", "d_0", "rho",
               "rotor_solidity", "rotor_area", "delta_u", "omega", "rotor_radius", "w_u", "k_u"),
    "constraints": ("z_min", "z_max", "theta_min_deg", "theta_max_deg", "v_min", "v_max",
                    "d_min", "c_min", "h_amb_min"),
    "solver": ("solver", "seed", "outer_population", "outer_iterations", "inner_population",
               "inner_iterations", "c1", "c2", "w_start", "w_end", "v_pso_max", "warm_start",
               "worker_count", "ga_population", "ga_generations", "ga_selection_rate",
               "ga_mutation_rate", "ga_mutation_scale", "ga_crossover_rate", "ga_blx_alpha",
               "ga_elite", "sa_iterations", "sa_t0", "sa_step_scale"),
}

# symbol-style spellings accepted in files and --set overrides
ALIASES = {
    "I": "n_uav", "N": "n_slots", "n_B": "n_bits", "n_L": "n_looks", "C_min": "c_min",
    "E_max": "e_max_wh", "h_min": "h_amb_min", "P_com_max": "p_com_max_dbw",
    "D1": "inner_population", "K1": "inner_iterations",
    "D2": "outer_population", "K2": "outer_iterations",
}

# Rotor solidity and disc area listed with the blade-level propulsion inputs
BLADE_ROTOR = {"rotor_solidity": 500.0, "rotor_area": 128.0}

_HOME = {key: section for section, keys in SECTIONS.items() for key in keys}
_INT_KEYS = {"n_uav", "n_slots", "seed", "outer_population", "outer_iterations",
             "inner_population", "inner_iterations", "worker_count", "ga_population",
             "ga_generations", "ga_elite", "sa_iterations"}
_STR_KEYS = {"propulsion_model", "solver"}
_SOLVERS = ("coevolution", "cga", "sa")


class ScenarioParseError(ValueError):
    """Malformed mission file or value that cannot be converted."""


@dataclass(frozen=True)
class SolverSettings:
    """Solver choice and budgets from the ``[solver]`` section."""

    solver: str = "coevolution"
    seed: int = 0
    outer_population: int = 128
    outer_iterations: int = 100
    inner_population: int = 500
    inner_iterations: int = 500
    c1: float = 2.5
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_pso_max: float = 1.0
    warm_start: bool = False
    worker_count: int = 1
    ga_population: int = 500
    ga_generations: int = 300
    ga_selection_rate: float = 0.3
    ga_mutation_rate: float = 0.1
    ga_mutation_scale: float = 0.1
    ga_crossover_rate: float = 1.0
    ga_blx_alpha: float = 0.1
    ga_elite: int = 1
    sa_iterations: int = 5000
    sa_t0: float = 10.0
    sa_step_scale: float = 0.05

    def __post_init__(self):
        if self.solver not in _SOLVERS:
            raise ScenarioError("solver", f"expected one of {_SOLVERS}, got {self.solver!r}")

    def coevolution(self, seed=None):
        inner = InnerConfig(
            population=self.inner_population, iterations=self.inner_iterations,
            c1=self.c1, c2=self.c2, w_start=self.w_start, w_end=self.w_end,
            v_pso_max=self.v_pso_max,
        )
        return CoevolutionConfig(
            outer_population=self.outer_population, outer_iterations=self.outer_iterations,
            inner=inner, c1=self.c1, c2=self.c2, w_start=self.w_start, w_end=self.w_end,
            v_pso_max=self.v_pso_max, worker_count=self.worker_count,
            seed=self.seed if seed is None else seed, warm_start=self.warm_start,
        )

    def ga(self, seed=None):
        return GaConfig(
            population=self.ga_population, generations=self.ga_generations,
            selection_rate=self.ga_selection_rate, mutation_rate=self.ga_mutation_rate,
            mutation_scale=self.ga_mutation_scale, crossover_rate=self.ga_crossover_rate,
            blx_alpha=self.ga_blx_alpha, elite=self.ga_elite,
            seed=self.seed if seed is None else seed,
        )

    def sa(self, seed=None):
        return SaConfig(
            iterations=self.sa_iterations, t0=self.sa_t0, step_scale=self.sa_step_scale,
            seed=self.seed if seed is None else seed,
        )


def canonical_key(key):
    """Field name for a key or alias; ``ScenarioError`` if unknown."""
    name = ALIASES.get(key, key)
    if name not in _HOME:
        raise ScenarioError(key, "unknown key")
    return name


def _convert(name, text):
    text = text.strip()
    try:
        if name in _STR_KEYS:
            return text
        if name in _INT_KEYS:
            value = float(text)
            if not value.is_integer():
                raise ValueError(f"not an integer: {text!r}")
            return int(value)
        if name == "warm_start":
            lowered = text.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no", "on", "off"):
                raise ValueError(f"not a boolean: {text!r}")
            return lowered in ("true", "1", "yes", "on")
        if name == "p_rad_dbw":
            return tuple(float(v) for v in text.split(","))
        if name == "phase_pairs":
            if text.lower() in ("", "all", "none"):
                return None
            pairs = []
            for item in text.split(","):
                i, j = item.strip().split("-")
                pairs.append((int(i), int(j)))
            return tuple(pairs)
        return float(text)
    except ValueError as exc:
        raise ScenarioParseError(f"{name}: {exc}") from exc


def _build(values):
    scenario_keys = {k: v for k, v in values.items() if _HOME[k] != "solver"}
    solver_keys = {k: v for k, v in values.items() if _HOME[k] == "solver"}
    if scenario_keys.get("propulsion_model") == "blade":
        for key, value in BLADE_ROTOR.items():
            scenario_keys.setdefault(key, value)
    return ScenarioParams(**scenario_keys), SolverSettings(**solver_keys)


def parse_config(text, overrides=()):
    """Parse mission-file text plus ``KEY=VALUE`` overrides.

    Returns
    -------
    ScenarioParams, SolverSettings

    Raises
    ------
    ScenarioParseError
        Malformed text or an unconvertible value.
    ScenarioError
        Unknown key, key in the wrong section, or an invalid value; ``.key``
        names the offending key.
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioParseError(str(exc)) from exc
    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ScenarioError(section, f"unknown section; expected one of {sorted(SECTIONS)}")
        for key, raw in parser.items(section):
            name = canonical_key(key)
            if _HOME[name] != section:
                raise ScenarioError(key, f"belongs in section [{_HOME[name]}], not [{section}]")
            if name in values:
                raise ScenarioError(key, "given more than once")
            values[name] = _convert(name, raw)
    values = apply_overrides(values, overrides)
    return _build(values)


def apply_overrides(values, overrides):
    """Merge ``KEY=VALUE`` strings (or ``(key, value)`` pairs) into ``values``."""
    values = dict(values)
    for item in overrides:
        if isinstance(item, str):
            if "=" not in item:
                raise ScenarioParseError(f"override {item!r} is not KEY=VALUE")
            key, raw = item.split("=", 1)
        else:
            key, raw = item
        name = canonical_key(key.strip())
        values[name] = _convert(name, str(raw)) if isinstance(raw, str) else raw
    return values


def load_config(path, overrides=()):
    """Read a mission file; see :func:`parse_config`."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, overrides)


def load_scenario(path, overrides=()):
    """Scenario parameters of a mission file (solver settings dropped)."""
    return load_config(path, overrides)[0]


def _format(value):
    if value is None:
        return "all"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{i}-{j}" for i, j in value)
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def scenario_to_ini(params, settings=None):
    """Mission-file text that reloads to an equal ``ScenarioParams``."""
    items = params.config_items()
    if settings is not None:
        items.update(dataclasses.asdict(settings))
    lines = []
    for section, keys in SECTIONS.items():
        present = [k for k in keys if k in items]
        if not present:
            continue
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_format(items[k])}" for k in present)
        lines.append("")
    return "\n".join(lines)


def _csv_value(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace(path, rows, include_time=True):
    """Write trace rows as CSV in generation order.

    ``wall_time_s`` is left empty when ``include_time`` is false, which makes
    the file a pure function of scenario, solver and seed.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in rows:
            out = []
            for col in TRACE_COLUMNS:
                if col == "wall_time_s" and not include_time:
                    out.append("")
                else:
                    out.append(_csv_value(row[col]))
            writer.writerow(out)


def _finite(value):
    """JSON-safe float: non-finite values become strings."""
    value = float(value)
    if math.isfinite(value):
        return value
    return "inf" if value > 0 else ("-inf" if value < 0 else "nan")


def solution_to_dict(solution, params, solver, settings=None):
    """Structured report of a solution; JSON-serialisable."""
    plan = solution.plan
    report = solution.report
    eta = np.asarray(plan.plan.p_com)
    energy = comms.total_energy(plan.plan, plan.v_y, params)
    return {
        "solver": solver,
        "seed": int(solution.seed),
        "feasible": bool(report.feasible),
        "fitness": _finite(solution.fitness),
        "sigma_h": _finite(report.sigma_h),
        "v_y": float(plan.v_y),
        "formation": [{"uav": k + 1, "x": float(x), "z": float(z)}
                      for k, (x, z) in enumerate(plan.formation)],
        "pairs": [{key: _finite(v) if isinstance(v, float) else v
                   for key, v in m.as_dict().items()} for m in report.per_pair],
        "violations": {k: _finite(v) for k, v in report.g.items()},
        "constraints": dict(report.flags),
        "energy_j": [_finite(e) for e in energy],
        "energy_budget_j": float(params.e_max),
        "power_w": {
            "min": _finite(eta.min()), "max": _finite(eta.max()), "mean": _finite(eta.mean()),
            "per_uav_sum": [_finite(v) for v in eta.sum(axis=1)],
            "peak_cap": float(params.p_com_max),
        },
        "generations": len(solution.outer_trace),
        "scenario": {k: _format(v) if isinstance(v, tuple) or v is None else v
                     for k, v in params.config_items().items()},
        "solver_settings": None if settings is None else dataclasses.asdict(settings),
    }


def write_solution(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
