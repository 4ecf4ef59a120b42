"""Command-line front end: one subcommand per scenario, CSV artifacts plus a
JSON run manifest.

Exit codes: 0 success, 2 schema violation, 3 solver divergence/collapse or
scan non-convergence, 4 I/O failure. CSV floats are written with 17
significant digits so identical configs produce byte-identical artifacts;
`--threads` only parallelizes the independent ADI line solves and never
changes results.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .comparison import (
    GPE3D_TOKEN,
    ConvergenceError,
    compare_models,
    match_scan,
)
from .config import SCENARIOS, ConfigError, RunConfig, load_config
from .grids import CouplingParams, Grid1D, Grid3D
from .nonlinearity import ModelKind, NonlinearModel
from .solver1d import DivergenceError, SolverConfig1D, ground_state_1d
from .solver3d import SolverConfig3D, ground_state_3d, project_axial
from .width import DensityArgs, InvalidRegionError, WidthStatus, solve_width, weak_width, width_map

__all__ = ["main", "entry", "run"]


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_density_csv(path: Path, x: np.ndarray, density: np.ndarray) -> None:
    _write_csv(path, ["x", "density"], ((_fmt(xi), _fmt(di)) for xi, di in zip(x, density)))


def _grid_1d(config: RunConfig) -> Grid1D:
    return Grid1D(config["grid.half_width"], config["grid.points"])


def _grid_3d(config: RunConfig) -> Grid3D:
    return Grid3D(
        axial=_grid_1d(config),
        transverse_half_width=config["grid3d.transverse_half_width"],
        transverse_points=config["grid3d.transverse_points"],
    )


def _couplings(config: RunConfig) -> CouplingParams:
    return CouplingParams(
        g3=config["coupling.g3"], g5=config["coupling.g5"], lam=config["coupling.lambda"]
    )


def _run_width_map(config: RunConfig, out: Path, threads: int):
    table = width_map(
        (config["map.a3_min"], config["map.a3_max"]),
        (config["map.a5_min"], config["map.a5_max"]),
        config["map.resolution"],
    )
    path = out / "width_map.csv"
    _write_csv(
        path,
        ["a3", "a5", "s", "status"],
        (
            (_fmt(a3), _fmt(a5), _fmt(s) if status is WidthStatus.VALID else "", status.value)
            for a3, a5, s, status in table.rows()
        ),
    )
    return [path], {"rows": len(table)}


def _run_width_curves(config: RunConfig, out: Path, threads: int):
    sweep = np.linspace(
        config["curves.sweep_min"], config["curves.sweep_max"], config["curves.points"]
    )
    fixed = config["curves.fixed"]
    fixed_value = config["curves.fixed_value"]
    rows = []
    invalid = 0
    for arg in sweep:
        a3, a5 = (fixed_value, arg) if fixed == "a3" else (arg, fixed_value)
        solution = solve_width(DensityArgs(a3, a5))
        if solution.status is WidthStatus.VALID:
            s_exact = _fmt(solution.s)
        else:
            s_exact = ""
            invalid += 1
        rows.append((_fmt(arg), s_exact, _fmt(weak_width(DensityArgs(a3, a5)) ** 2)))
    path = out / "width_curves.csv"
    _write_csv(path, ["arg", "s_exact", "sigma2_weak"], rows)
    return [path], {"rows": len(rows), "invalid_points": invalid}


def _run_stats(result) -> dict:
    return {
        "mu": result.mu,
        "energy": result.energy,
        "iterations": result.iterations,
        "converged": result.converged,
    }


def _run_ground_state(config: RunConfig, out: Path, threads: int):
    kind = config["model.kind"]
    couplings = _couplings(config)
    start = time.perf_counter()
    if kind == GPE3D_TOKEN:
        solver_config = SolverConfig3D(
            grid=_grid_3d(config), couplings=couplings,
            dt=config["solver.dt3d"], max_iters=config["solver.max_iters"],
            mu_tol=config["solver.mu_tol3d"],
        )
        result = ground_state_3d(solver_config, threads=threads)
        profile = project_axial(result.wavefunction)
        x, density = profile.grid.nodes, profile.density
    else:
        if kind == ModelKind.NPSE_CUBIC.value and couplings.g5 != 0.0:
            raise ConfigError("model.kind = npse-cubic requires coupling.g5 = 0")
        grid = _grid_1d(config)
        model = NonlinearModel(kind=ModelKind(kind), g3=couplings.g3, g5=couplings.g5)
        solver_config = SolverConfig1D(
            grid=grid, model=model, lam=couplings.lam, dt=config["solver.dt"],
            max_iters=config["solver.max_iters"], mu_tol=config["solver.mu_tol"],
        )
        result = ground_state_1d(solver_config)
        x, density = grid.nodes, result.wavefunction.density()
    stats = _run_stats(result)
    stats["wall_time_s"] = time.perf_counter() - start
    path = out / f"density_{kind}.csv"
    _write_density_csv(path, x, density)
    return [path], {kind: stats}


def _run_compare(config: RunConfig, out: Path, threads: int):
    models = config["compare.models"]
    couplings = _couplings(config)
    if ModelKind.NPSE_CUBIC.value in models and couplings.g5 != 0.0:
        raise ConfigError("compare.models includes npse-cubic, which requires coupling.g5 = 0")
    grid = _grid_1d(config)
    report = compare_models(
        models, grid, couplings,
        grid3d=_grid_3d(config) if GPE3D_TOKEN in models else None,
        dt_1d=config["solver.dt"], dt_3d=config["solver.dt3d"],
        mu_tol_1d=config["solver.mu_tol"], mu_tol_3d=config["solver.mu_tol3d"],
        max_iters=config["solver.max_iters"], threads=threads,
    )
    artifacts = []
    for token in models:
        path = out / f"density_{token}.csv"
        _write_density_csv(path, grid.nodes, report.profiles[token])
        artifacts.append(path)
    report_path = out / "report.csv"
    _write_csv(
        report_path,
        ["pair", "linf_rel", "l2_rel", "dmu"],
        ((pair, _fmt(linf), _fmt(l2), _fmt(dmu)) for pair, linf, l2, dmu in report.metrics),
    )
    artifacts.append(report_path)
    runs = {
        token: {
            "mu": stats.mu, "energy": stats.energy, "iterations": stats.iterations,
            "converged": stats.converged, "wall_time_s": stats.wall_time_s,
        }
        for token, stats in report.stats.items()
    }
    return artifacts, runs


def _run_match_scan(config: RunConfig, out: Path, threads: int):
    grid = _grid_1d(config)
    result = match_scan(
        config["match.g5"], config["coupling.lambda"], grid=grid,
        dt=config["solver.dt"], mu_tol=config["solver.mu_tol"],
        max_iters=config["solver.max_iters"],
        g3_tol=config["match.g3_tol"], max_outer=config["match.max_outer"],
    )
    scan_path = out / "match_scan.csv"
    _write_csv(
        scan_path,
        ["outer_iter", "g3", "peak_density"],
        ((str(i), _fmt(g3), _fmt(peak)) for i, (g3, peak) in enumerate(result.history, start=1)),
    )
    np_path = out / "density_np.csv"
    cq_path = out / "density_cq-poly.csv"
    _write_density_csv(np_path, grid.nodes, result.np_profile)
    _write_density_csv(cq_path, grid.nodes, result.cq_profile)
    report_path = out / "report.csv"
    _write_csv(
        report_path,
        ["pair", "linf_rel", "l2_rel", "dmu"],
        [("np-cq-poly", _fmt(result.linf), _fmt(result.l2), _fmt(result.dmu))],
    )
    runs = {
        "matched_g3": result.g3,
        "outer_iterations": result.outer_iterations,
        "linf_rel": result.linf,
        "baseline_linf_rel": result.baseline_linf,
    }
    return [scan_path, np_path, cq_path, report_path], runs


_RUNNERS = {
    "width-map": _run_width_map,
    "width-curves": _run_width_curves,
    "ground-state": _run_ground_state,
    "compare": _run_compare,
    "match-scan": _run_match_scan,
}


def run(config: RunConfig, threads: int = 1) -> list[Path]:
    """Execute a validated configuration: write CSV artifacts plus
    manifest.json and return the artifact paths."""
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    artifacts, runs = _RUNNERS[config.scenario](config, out, threads)
    manifest = {
        "scenario": config.scenario,
        "config": {k: (list(v) if isinstance(v, list) else v) for k, v in config.values.items()},
        "artifacts": [p.name for p in artifacts],
        "runs": runs,
        "wall_time_s": time.perf_counter() - start,
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return artifacts + [manifest_path]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqgpe",
        description="Cigar-trap cubic-quintic condensate solvers and dataset generation.",
    )
    subparsers = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sub = subparsers.add_parser(name, help=f"run a '{name}' configuration")
        sub.add_argument("--config", required=True, help="path to the run configuration file")
        sub.add_argument("--out", default=None, help="output directory (overrides the config)")
        sub.add_argument(
            "--threads", type=int, default=1,
            help="worker threads for ADI line solves; never changes results",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config, out_override=args.out)
        if config.scenario != args.scenario:
            raise ConfigError(
                f"config declares scenario '{config.scenario}' but the "
                f"'{args.scenario}' subcommand was invoked"
            )
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        artifacts = run(config, threads=args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidRegionError, DivergenceError, ConvergenceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    for path in artifacts:
        print(path)
    return 0


def entry() -> None:
    sys.exit(main())
