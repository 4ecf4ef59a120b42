"""Cross-model density comparisons and the coupling-matching scan.

All compared profiles live on one shared axial grid: the 1D models are solved
directly on it and the 3D run is projected onto it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .grids import CouplingParams, Grid1D, Grid3D, Wavefunction1D
from .nonlinearity import ModelKind, NonlinearModel, matched_g3
from .solver1d import GroundStateResult, SolverConfig1D, ground_state_1d
from .solver3d import SolverConfig3D, ground_state_3d, project_axial

__all__ = [
    "GPE3D_TOKEN",
    "MODEL_TOKENS",
    "RunStats",
    "ComparisonReport",
    "MatchScanResult",
    "ConvergenceError",
    "linf_rel",
    "l2_rel",
    "compare_models",
    "match_scan",
]

GPE3D_TOKEN = "gpe3d"
MODEL_TOKENS = (GPE3D_TOKEN,) + tuple(kind.value for kind in ModelKind)


class ConvergenceError(RuntimeError):
    """An iterative scan failed to reach its tolerance."""


def linf_rel(reference: np.ndarray, other: np.ndarray) -> float:
    """Max absolute density difference normalized by the reference peak."""
    return float(np.max(np.abs(reference - other)) / np.max(reference))


def l2_rel(reference: np.ndarray, other: np.ndarray, spacing: float) -> float:
    num = np.sqrt(np.sum((reference - other) ** 2) * spacing)
    den = np.sqrt(np.sum(reference**2) * spacing)
    return float(num / den)


@dataclass(frozen=True)
class RunStats:
    mu: float
    energy: float
    iterations: int
    converged: bool
    wall_time_s: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-model axial density profiles on a shared grid plus pairwise metrics."""

    grid: Grid1D
    couplings: CouplingParams
    profiles: dict[str, np.ndarray]
    stats: dict[str, RunStats]
    metrics: list[tuple[str, float, float, float]] = field(default_factory=list)


def _solve_1d_model(
    kind: ModelKind,
    grid: Grid1D,
    couplings: CouplingParams,
    dt: float,
    mu_tol: float,
    max_iters: int,
    initial_guess: Wavefunction1D | None = None,
) -> tuple[GroundStateResult, float]:
    g5 = couplings.g5 if kind is not ModelKind.NPSE_CUBIC else 0.0
    model = NonlinearModel(kind=kind, g3=couplings.g3, g5=g5)
    config = SolverConfig1D(
        grid=grid, model=model, lam=couplings.lam, dt=dt,
        max_iters=max_iters, mu_tol=mu_tol,
    )
    start = time.perf_counter()
    result = ground_state_1d(config, initial_guess)
    return result, time.perf_counter() - start


def compare_models(
    models: list[str],
    grid: Grid1D,
    couplings: CouplingParams,
    *,
    grid3d: Grid3D | None = None,
    dt_1d: float = 1e-3,
    dt_3d: float = 2e-3,
    mu_tol_1d: float = 1e-9,
    mu_tol_3d: float = 1e-8,
    max_iters: int = 200_000,
    threads: int = 1,
) -> ComparisonReport:
    """Solve the requested models at common couplings and compare the axial
    densities pairwise. The 3D run requires `grid3d` whose axial grid must
    equal `grid`."""
    unknown = [m for m in models if m not in MODEL_TOKENS]
    if unknown:
        raise ValueError(f"unknown model tokens: {unknown}")
    if ModelKind.NPSE_CUBIC.value in models and couplings.g5 != 0.0:
        raise ValueError("the cubic-only model can only be compared at g5 = 0")

    profiles: dict[str, np.ndarray] = {}
    stats: dict[str, RunStats] = {}
    for token in models:
        if token == GPE3D_TOKEN:
            if grid3d is None:
                raise ValueError("a 3D grid is required to run the gpe3d model")
            if grid3d.axial != grid:
                raise ValueError("the 3D axial grid must match the comparison grid")
            config3d = SolverConfig3D(
                grid=grid3d, couplings=couplings, dt=dt_3d,
                max_iters=max_iters, mu_tol=mu_tol_3d,
            )
            start = time.perf_counter()
            result3d = ground_state_3d(config3d, threads=threads)
            wall = time.perf_counter() - start
            profiles[token] = project_axial(result3d.wavefunction).density
            stats[token] = RunStats(result3d.mu, result3d.energy, result3d.iterations,
                                    result3d.converged, wall)
        else:
            result, wall = _solve_1d_model(
                ModelKind(token), grid, couplings, dt_1d, mu_tol_1d, max_iters
            )
            profiles[token] = result.wavefunction.density()
            stats[token] = RunStats(result.mu, result.energy, result.iterations,
                                    result.converged, wall)

    metrics = []
    for i, first in enumerate(models):
        for second in models[i + 1:]:
            metrics.append((
                f"{first}-{second}",
                linf_rel(profiles[first], profiles[second]),
                l2_rel(profiles[first], profiles[second], grid.spacing),
                abs(stats[first].mu - stats[second].mu),
            ))
    return ComparisonReport(grid=grid, couplings=couplings, profiles=profiles,
                            stats=stats, metrics=metrics)


@dataclass(frozen=True)
class MatchScanResult:
    g3: float
    g5: float
    lam: float
    outer_iterations: int
    history: list[tuple[float, float]]     # (g3, peak density) per outer pass
    grid: Grid1D
    np_profile: np.ndarray
    cq_profile: np.ndarray
    linf: float
    l2: float
    dmu: float
    baseline_linf: float


def match_scan(
    g5: float,
    lam: float,
    *,
    grid: Grid1D | None = None,
    dt: float = 1e-3,
    mu_tol: float = 1e-9,
    max_iters: int = 200_000,
    g3_tol: float = 1e-6,
    max_outer: int = 50,
) -> MatchScanResult:
    """Self-consistent matching of the two-body coupling to the density peak.

    Repeatedly solves the nonpolynomial ground state, updates
    g3 <- -(4/3)*g5*max|phi|^2, and stops when g3 moves less than g3_tol.
    Reports the matched-coupling agreement between the nonpolynomial and
    polynomial models and, for reference, the same comparison at g3 = 0.
    """
    if grid is None:
        grid = Grid1D(20.0, 513)
    if not np.isfinite(g5):
        raise ValueError("g5 must be finite")

    g3 = 0.0
    history: list[tuple[float, float]] = []
    converged = False
    outer = 0
    # every pass restarts from the default guess: the peak is then a smooth
    # deterministic function of g3 and the iteration contracts cleanly,
    # instead of inheriting the previous pass's residual convergence error
    for outer in range(1, max_outer + 1):
        couplings = CouplingParams(g3=g3, g5=g5, lam=lam)
        result, _ = _solve_1d_model(ModelKind.NP_GENERAL, grid, couplings,
                                    dt, mu_tol, max_iters)
        peak = float(np.max(result.wavefunction.density()))
        g3_next = matched_g3(g5, peak)
        history.append((g3_next, peak))
        if abs(g3_next - g3) < g3_tol:
            g3 = g3_next
            converged = True
            break
        g3 = g3_next
    if not converged:
        raise ConvergenceError(
            f"matching scan did not settle within {max_outer} passes (last g3 = {g3:.6g})"
        )

    def _pair(g3_value: float):
        couplings = CouplingParams(g3=g3_value, g5=g5, lam=lam)
        np_result, _ = _solve_1d_model(ModelKind.NP_GENERAL, grid, couplings,
                                       dt, mu_tol, max_iters)
        cq_result, _ = _solve_1d_model(ModelKind.CQ_POLYNOMIAL, grid, couplings,
                                       dt, mu_tol, max_iters)
        return np_result, cq_result

    np_result, cq_result = _pair(g3)
    np_rho = np_result.wavefunction.density()
    cq_rho = cq_result.wavefunction.density()
    base_np, base_cq = _pair(0.0)
    baseline = linf_rel(base_np.wavefunction.density(), base_cq.wavefunction.density())

    return MatchScanResult(
        g3=g3, g5=g5, lam=lam, outer_iterations=outer, history=history,
        grid=grid, np_profile=np_rho, cq_profile=cq_rho,
        linf=linf_rel(np_rho, cq_rho),
        l2=l2_rel(np_rho, cq_rho, grid.spacing),
        dmu=abs(np_result.mu - cq_result.mu),
        baseline_linf=baseline,
    )
