"""Command-line driver: single runs, parameter sweeps, validation and reports.

Exit codes: 0 feasible plan, 2 best plan infeasible, 1 internal error,
64 bad command line or unreadable/malformed mission file, 65 invalid
scenario value, 66 output directory not writable.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import mission
from .baselines import cga_solve, sa_solve
from .coevolution import solve
from .params import ScenarioError

__all__ = ["SweepSpec", "run_experiment", "run_sweep", "main",
           "EXIT_OK", "EXIT_INFEASIBLE", "EXIT_INTERNAL", "EXIT_PARSE", "EXIT_INVALID",
           "EXIT_CANTWRITE"]

log = logging.getLogger("swarminsar")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 64
EXIT_INVALID = 65
EXIT_CANTWRITE = 66

SOLVERS = ("coevolution", "cga", "sa")
SUMMARY_COLUMNS = ("variable", "value", "solver", "runs", "feasible_runs", "failed_runs",
                   "median_sigma_h", "min_sigma_h", "max_sigma_h")


@dataclass(frozen=True)
class SweepSpec:
    """One scenario key varied over ``values`` for every solver and seed."""

    variable: str
    values: tuple
    solvers: tuple = ("coevolution",)
    seeds: tuple = (0,)

    def __post_init__(self):
        if not self.values:
            raise ScenarioError("values", "sweep needs at least one value")
        if not self.seeds:
            raise ScenarioError("seeds", "sweep needs at least one seed")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ScenarioError("solvers", f"unknown solver {s!r}")
        if not self.solvers:
            raise ScenarioError("solvers", "sweep needs at least one solver")
        name = mission.canonical_key(self.variable)
        if name in mission.SECTIONS["solver"]:
            raise ScenarioError(self.variable, "sweep variable must be a scenario key")

    @property
    def key(self):
        return mission.canonical_key(self.variable)


def _solve(params, settings, solver, seed):
    if solver == "coevolution":
        return solve(params, settings.coevolution(seed))
    if solver == "cga":
        return cga_solve(params, settings.ga(seed))
    if solver == "sa":
        return sa_solve(params, settings.sa(seed))
    raise ScenarioError("solver", f"unknown solver {solver!r}")


def _prepare_dir(out_dir):
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        log.error("output directory %s is not writable: %s", out, exc)
        return None
    return out


def run_experiment(params, settings, out_dir, solver=None, seed=None, timing=True):
    """Solve one scenario and write ``trace.csv``, ``solution.json``, ``scenario.ini``.

    ``trace.csv`` carries no wall-clock values so it depends only on the
    scenario, solver and seed; per-generation times go to ``timing.csv``
    unless ``timing`` is false.

    Returns
    -------
    int
        Exit code (see module docstring).
    """
    solver = settings.solver if solver is None else solver
    seed = settings.seed if seed is None else seed
    settings = replace(settings, solver=solver, seed=seed)
    out = _prepare_dir(out_dir)
    if out is None:
        return EXIT_CANTWRITE
    try:
        solution = _solve(params, settings, solver, seed)
        mission.write_trace(out / "trace.csv", solution.outer_trace, include_time=False)
        if timing:
            with open(out / "timing.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(("generation", "wall_time_s"))
                for row in solution.outer_trace:
                    writer.writerow((row["generation"], repr(float(row["wall_time_s"]))))
        report = mission.solution_to_dict(solution, params, solver, settings)
        report["wall_time_s"] = solution.wall_time_s if timing else None
        mission.write_solution(out / "solution.json", report)
        (out / "scenario.ini").write_text(mission.scenario_to_ini(params, settings), encoding="utf-8")
    except OSError as exc:
        log.error("cannot write results to %s: %s", out, exc)
        return EXIT_CANTWRITE
    except Exception:
        log.exception("solver %s failed", solver)
        return EXIT_INTERNAL
    log.info("%s seed %d: feasible=%s sigma_h=%.6g v_y=%.4g",
             solver, seed, solution.feasible, solution.report.sigma_h, solution.plan.v_y)
    return EXIT_OK if solution.feasible else EXIT_INFEASIBLE


def _cell_dir(out, spec, value, solver, seed):
    return out / f"{spec.key}={value}" / solver / f"seed={seed}"


def _run_cell(args):
    params, settings, out_dir, solver, seed = args
    return run_experiment(params, settings, out_dir, solver=solver, seed=seed, timing=False)


def run_sweep(params, settings, spec, out_dir, jobs=1):
    """Run every (value, solver, seed) cell and write ``summary.csv``.

    Failed cells are recorded and the sweep carries on.  The summary holds
    median/min/max final ``sigma_h`` over the feasible runs of each
    (value, solver) cell.

    Returns
    -------
    int
        0 when every run completed (feasible or not), 1 if any run failed,
        66 if the output directory is not writable.
    """
    out = _prepare_dir(out_dir)
    if out is None:
        return EXIT_CANTWRITE
    tasks, keys = [], []
    for value in spec.values:
        try:
            cell_params = params.replace(**{spec.key: value})
        except ScenarioError as exc:
            log.error("sweep value %s=%r rejected: %s", spec.key, value, exc)
            cell_params = None
        for solver in spec.solvers:
            for seed in spec.seeds:
                keys.append((value, solver, seed))
                tasks.append((cell_params, settings, _cell_dir(out, spec, value, solver, seed),
                              solver, seed))
    codes = {}
    runnable = [(k, t) for k, t in zip(keys, tasks) if t[0] is not None]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for (key, _), code in zip(runnable, pool.map(_run_cell, [t for _, t in runnable])):
                codes[key] = code
    else:
        for key, task in runnable:
            codes[key] = _run_cell(task)
    rows = []
    for value in spec.values:
        for solver in spec.solvers:
            sigmas, failed = [], 0
            for seed in spec.seeds:
                code = codes.get((value, solver, seed), EXIT_INTERNAL)
                if code not in (EXIT_OK, EXIT_INFEASIBLE):
                    failed += 1
                    continue
                if code == EXIT_OK:
                    path = _cell_dir(out, spec, value, solver, seed) / "solution.json"
                    sigmas.append(json.loads(path.read_text(encoding="utf-8"))["sigma_h"])
            stats = ("", "", "")
            if sigmas:
                stats = tuple(repr(float(v)) for v in
                              (statistics.median(sigmas), min(sigmas), max(sigmas)))
            rows.append((spec.variable, value, solver, len(spec.seeds), len(sigmas), failed, *stats))
    try:
        with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_COLUMNS)
            writer.writerows(rows)
    except OSError as exc:
        log.error("cannot write summary: %s", exc)
        return EXIT_CANTWRITE
    return EXIT_INTERNAL if any(r[5] for r in rows) else EXIT_OK


def _load(args):
    overrides = list(args.set or [])
    if args.scenario is None:
        return mission.parse_config("", overrides)
    return mission.load_config(args.scenario, overrides)


def _parse_values(text):
    out = []
    for item in text.split(","):
        item = item.strip()
        value = float(item)
        out.append(int(value) if value.is_integer() and "." not in item and "e" not in item.lower()
                   else value)
    return tuple(out)


def _print_report(data, stream):
    p = stream.write
    p(f"solver {data['solver']}  seed {data['seed']}  feasible {data['feasible']}\n")
    p(f"sigma_h {data['sigma_h']} m  v_y {data['v_y']:.4f} m/s\n\n")
    p("uav        x (m)      z (m)\n")
    for u in data["formation"]:
        p(f"{u['uav']:>3} {u['x']:>12.3f} {u['z']:>10.3f}\n")
    p("\npair      b (m)   b_perp (m)  h_amb (m)    gamma  sigma_h (m)\n")
    for m in data["pairs"]:
        p(f"{m['i']}-{m['j']:<3} {m['b']:>8.3f} {m['b_perp']:>12.4f} {_num(m['h_amb']):>10} "
          f"{m['gamma']:>8.4f} {_num(m['sigma_h_pair']):>12}\n")
    p("\nviolations " + " ".join(f"{k}={v}" for k, v in data["violations"].items()) + "\n")
    p("constraints " + " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in data["constraints"].items()) + "\n")
    p("energy (J) " + " ".join(_num(e, 1) for e in data["energy_j"])
      + f"  budget {data['energy_budget_j']:.1f}\n")


def _num(v, digits=4):
    return v if isinstance(v, str) else f"{v:.{digits}f}"


def build_parser():
    parser = argparse.ArgumentParser(prog="swarminsar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="verb", required=True)

    def scenario_opts(p):
        p.add_argument("--scenario", metavar="PATH", help="mission file (defaults if omitted)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key")

    run = sub.add_parser("run", help="solve one scenario")
    scenario_opts(run)
    run.add_argument("--solver", choices=SOLVERS)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", required=True, metavar="DIR")
    run.add_argument("--jobs", type=int, default=None, help="island worker processes")

    sweep = sub.add_parser("sweep", help="vary one key over several values")
    scenario_opts(sweep)
    sweep.add_argument("--variable", required=True, help="e.g. h_amb_min, C_min, n_B, I")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--solver", action="append", choices=SOLVERS, help="repeatable")
    sweep.add_argument("--seeds", default="0", help="comma-separated integer seeds")
    sweep.add_argument("--out", required=True, metavar="DIR")
    sweep.add_argument("--jobs", type=int, default=1, help="cells run in parallel")

    validate = sub.add_parser("validate", help="check a mission file and echo it normalised")
    scenario_opts(validate)

    report = sub.add_parser("report", help="pretty-print a solution.json")
    report.add_argument("path")
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which would read as "infeasible"
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.verb == "report":
            try:
                data = json.loads(Path(args.path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
                return EXIT_PARSE
            _print_report(data, sys.stdout)
            return EXIT_OK
        params, settings = _load(args)
        if args.verb == "validate":
            sys.stdout.write(mission.scenario_to_ini(params, settings))
            return EXIT_OK
        if args.verb == "run":
            if args.jobs is not None:
                if args.jobs < 1:
                    raise ScenarioError("jobs", "must be >= 1")
                settings = replace(settings, worker_count=args.jobs)
            return run_experiment(params, settings, args.out, solver=args.solver, seed=args.seed)
        if args.verb == "sweep":
            try:
                values = _parse_values(args.values)
                seeds = tuple(int(s) for s in args.seeds.split(","))
            except ValueError as exc:
                raise mission.ScenarioParseError(f"bad sweep list: {exc}") from exc
            spec = SweepSpec(args.variable, values, tuple(args.solver or (settings.solver,)), seeds)
            if args.jobs < 1:
                raise ScenarioError("jobs", "must be >= 1")
            return run_sweep(params, settings, spec, args.out, jobs=args.jobs)
    except mission.ScenarioParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioError as exc:
        print(f"error: invalid value for {exc.key!r}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_INTERNAL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
