"""Command-line front end: ``nehari {solve,sweep,verify,continue} CONFIG``.

Exit codes: 0 success, 1 configuration error, 2 solver did not converge,
3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import checks, fibering
from .config import CHECKS, ConfigError, ExperimentConfig
from .grid import DomainKind, write_field
from .params import ParameterError, classify_case
from .solver import SolveReport, continuation_in_lambda3, minimize

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_VERIFY_FAIL = 0, 1, 2, 3

REPORT_COLUMNS = ["case", "N", "s1", "s2", "s3", "p", "lambda1", "lambda2", "lambda3", "h",
                  "energy", "grad_norm", "nehari_residual", "iters", "ps_bound_ok",
                  "multiplier_bound_ok"]
SWEEP_COLUMNS = ["index", "axis", "value", "status"] + REPORT_COLUMNS + ["energy_delta"]
CONTINUATION_COLUMNS = ["index", "lambda3", "energy", "grad_norm", "nehari_residual", "iters",
                        "converged", "min_value", "detached"]

log = logging.getLogger("nehari")

# failures that are the user's to fix; reported as one line with exit 1
USER_ERRORS = (ConfigError, ParameterError, fibering.UnsupportedCase, ValueError)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.16e}"
    return str(x)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c, "")) for c in columns])


def report_row(rep: SolveReport, h: float) -> dict:
    p = rep.params
    return {"case": str(classify_case(p)), "N": p.N, "s1": p.s1, "s2": p.s2, "s3": p.s3,
            "p": p.p, "lambda1": p.lambda1, "lambda2": p.lambda2, "lambda3": p.lambda3,
            "h": h, "energy": rep.energy, "grad_norm": rep.grad_norm,
            "nehari_residual": rep.nehari_residual, "iters": rep.iters,
            "ps_bound_ok": rep.ps_bound_ok, "multiplier_bound_ok": rep.multiplier_bound_ok}


# ------------------------------------------------------------- solve

def run_solve(cfg: ExperimentConfig) -> int:
    grid = cfg.grid()
    rep = minimize(grid, cfg.problem(), cfg.solve_config(grid))
    out = cfg.output_dir
    write_csv(out / "report.csv", REPORT_COLUMNS, [report_row(rep, grid.h)])
    write_field(rep.u_star, out / "solution.field")
    if not rep.converged:
        print(f"not converged after {rep.iters} iterations "
              f"(grad_norm={rep.grad_norm:.3e}); best iterate written", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ------------------------------------------------------------- sweep

def _axis_change(axis: str, value: float) -> dict:
    key = {"lambda1": "params.lambda1", "lambda3": "params.lambda3", "p": "params.p",
           "h": "grid.h", "L": "domain.L"}[axis]
    return {key: [value] if axis == "L" else value}


def _sweep_point(args) -> dict:
    values, base_dir, axis, value = args
    cfg = ExperimentConfig(values, Path(base_dir)).with_values(
        **{k.replace(".", "__"): v for k, v in _axis_change(axis, value).items()})
    row = {"axis": axis, "value": value}
    try:
        grid = cfg.grid()
        rep = minimize(grid, cfg.problem(), cfg.solve_config(grid))
    except USER_ERRORS as exc:
        row["status"] = f"error: {exc}".replace("\n", " ")
        return row
    row.update(report_row(rep, grid.h))
    row["status"] = "converged" if rep.converged else "not_converged"
    return row


def worker_count() -> int:
    env = os.environ.get("NEHARI_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"NEHARI_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("NEHARI_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def run_sweep(cfg: ExperimentConfig) -> int:
    axis, values = cfg["sweep.axis"], cfg["sweep.values"]
    if axis is None:
        raise ConfigError("sweep needs sweep.axis")
    if not values:
        raise ConfigError("sweep.values is empty")
    jobs = [(cfg.values, str(cfg.base_dir), axis, v) for v in values]
    n = min(worker_count(), len(jobs))
    if n == 1:
        rows = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    prev = None
    for i, row in enumerate(rows):
        row["index"] = i
        if "energy" in row:
            if prev is not None:
                row["energy_delta"] = row["energy"] - prev
            prev = row["energy"]
    write_csv(cfg.output_dir / "sweep.csv", SWEEP_COLUMNS, rows)
    ok = sum(r["status"] == "converged" for r in rows)
    if ok == 0:
        print("no sweep point converged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------- continue

def run_continue(cfg: ExperimentConfig) -> int:
    path = cfg["continue.path"]
    if not path:
        raise ConfigError("continue needs a non-empty continue.path")
    grid = cfg.grid()
    reports = continuation_in_lambda3(grid, cfg.problem(), path, cfg.solve_config(grid))
    rows = [{"index": i, "lambda3": r.params.lambda3, "energy": r.energy,
             "grad_norm": r.grad_norm, "nehari_residual": r.nehari_residual, "iters": r.iters,
             "converged": r.converged, "min_value": float(r.u_star.values.min()),
             "detached": r.detached} for i, r in enumerate(reports)]
    out = cfg.output_dir
    write_csv(out / "continuation.csv", CONTINUATION_COLUMNS, rows)
    write_field(reports[-1].u_star, out / "solution.field")
    return EXIT_OK if all(r.converged for r in reports) else EXIT_NOT_CONVERGED


# ------------------------------------------------------------ verify

DEFAULT_EPSILONS = (0.5, 0.35, 0.25, 0.2)


def run_verify(cfg: ExperimentConfig) -> int:
    names = cfg["verify.checks"] or list(CHECKS)
    samples, seed = cfg["verify.samples"], cfg["verify.seed"]
    params = cfg.problem()
    spec = cfg.domain()
    grid = cfg.grid()
    solve_cfg = cfg.solve_config(grid)
    hs_L = cfg["verify.halfspace_L"] or float(spec.extent[0])
    results = []
    for name in names:
        if name == "fibering":
            res = checks.fibering_check(samples or 500, seed)
        elif name == "gradient":
            res = checks.gradient_check(grid, params, samples or 50, seed,
                                        corrupt=cfg["debug.corrupt_gradient"],
                                        positive_part=solve_cfg.positive_part)
        elif name == "scaling":
            res = checks.scaling_check(grid, params, samples or 100, seed)
        elif name == "brezis_lieb":
            res = checks.brezis_lieb_check(grid, params)
        elif name == "threshold":
            res = checks.threshold_check(grid, params, solve_cfg, hs_L)
        else:
            if spec.kind is not DomainKind.PERTURBED_BOUNDARY:
                raise ConfigError("the testfunction check needs a PerturbedBoundary domain")
            res = checks.testfunction_check(spec, params, grid.h, hs_L,
                                            cfg["verify.epsilons"] or DEFAULT_EPSILONS,
                                            solve_cfg)
        print(res.line(), flush=True)
        results.append(res)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAIL


# -------------------------------------------------------------- main

COMMANDS = {"solve": run_solve, "sweep": run_sweep, "verify": run_verify,
            "continue": run_continue}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nehari", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", type=Path)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config)
        return COMMANDS[args.command](cfg)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
