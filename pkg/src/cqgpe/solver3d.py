"""Ground states of the full 3D cubic-quintic equation in a cigar trap.

The field obeys

    i psi_t = -0.5*Laplacian(psi) + [0.5*(y^2+z^2) + (lam*x)^2/2] psi
              + 2*pi*g3*|psi|^2 psi + 3*pi^2*g5*|psi|^4 psi

with the tight transverse trap at unit frequency. One step is Strang-split:
half-step pointwise multiplier, then three alternating-direction implicit
Crank-Nicolson sweeps (x, then y, then z, each a family of independent
tridiagonal line solves sharing one matrix), then the second half-step
multiplier. Imaginary time renormalizes after every full step.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import adi_kernels, tridiag
from .grids import (
    CouplingParams,
    Grid1D,
    Grid3D,
    Wavefunction3D,
    axial_potential,
    second_difference,
)
from .solver1d import DivergenceError, TimeMode

__all__ = [
    "SolverConfig3D",
    "GroundStateResult3D",
    "AxialProfile",
    "step_3d",
    "ground_state_3d",
    "project_axial",
    "transverse_width_profile",
    "energy_3d",
    "chemical_potential_3d",
    "gaussian_ansatz_3d",
]

CUBIC_PREFACTOR = 2.0 * np.pi
QUINTIC_PREFACTOR = 3.0 * np.pi**2


@dataclass(frozen=True)
class SolverConfig3D:
    grid: Grid3D
    couplings: CouplingParams
    dt: float = 2e-3
    max_iters: int = 200_000
    mu_tol: float = 1e-8

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be positive")
        if not (np.isfinite(self.mu_tol) and self.mu_tol > 0.0):
            raise ValueError("mu_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class GroundStateResult3D:
    wavefunction: Wavefunction3D
    mu: float
    energy: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class AxialProfile:
    """Transverse-integrated density rho(x) = integral |psi|^2 dy dz."""

    grid: Grid1D
    density: np.ndarray


def _potential_3d(grid: Grid3D, lam: float) -> np.ndarray:
    x = grid.axial.nodes
    t = grid.transverse.nodes
    return (
        axial_potential(x, lam)[:, None, None]
        + 0.5 * (t[None, :, None] ** 2 + t[None, None, :] ** 2)
    )


class _Stepper3D:
    """Cached potential, CN factorizations and sweep kernels for one run."""

    def __init__(self, config: SolverConfig3D, mode: TimeMode, dtype):
        self.config = config
        self.mode = mode
        grid = config.grid
        self.v = _potential_3d(grid, config.couplings.lam)
        self.c3 = CUBIC_PREFACTOR * config.couplings.g3
        self.c5 = QUINTIC_PREFACTOR * config.couplings.g5
        if mode is TimeMode.IMAGINARY:
            z = 0.5 * config.dt
            self.phase = -0.5 * config.dt
        else:
            z = 0.5j * config.dt
            self.phase = -0.5j * config.dt
        self.dtype = np.result_type(dtype, type(z))
        self._factor_buf = None
        spacings = (grid.axial.spacing, grid.transverse.spacing, grid.transverse.spacing)
        self.sweeps = []
        for n, h in zip(grid.shape, spacings):
            kd = 1.0 / h**2
            ko = -0.5 / h**2
            a_off = self.dtype.type(z * ko)
            a_diag = self.dtype.type(1.0 + z * kd)
            w, dm = adi_kernels.factor_constant(a_off, a_diag, n)
            self.sweeps.append({
                "w": w.astype(self.dtype), "dm": dm.astype(self.dtype),
                "a_off": a_off,
                "b_off": self.dtype.type(-z * ko), "b_diag": self.dtype.type(1.0 - z * kd),
            })

    def multiplier(self, values: np.ndarray) -> np.ndarray:
        """Half-step pointwise factor at the instantaneous density; in place
        (returning its input) on the fast path, so callers must own `values`."""
        if adi_kernels.AVAILABLE and values.flags.c_contiguous and values.flags.writeable:
            adi_kernels.apply_multiplier(
                values.ravel(), self.v.ravel(), self.c3, self.c5, self.phase, 0, values.size
            )
            return values
        rho = np.abs(values) ** 2 if np.iscomplexobj(values) else values * values
        w = self.v + self.c3 * rho
        if self.c5 != 0.0:
            w += self.c5 * rho * rho
        return values * np.exp(self.phase * w)

    def half_factor(self, values: np.ndarray) -> np.ndarray:
        """exp(phase * (V + N(rho))) at the current density, as an array."""
        rho = np.abs(values) ** 2 if np.iscomplexobj(values) else values * values
        w = self.v + self.c3 * rho
        if self.c5 != 0.0:
            w += self.c5 * rho * rho
        return np.exp(self.phase * w)

    def _sweep_fallback(self, axis: int, values: np.ndarray, threads: int) -> np.ndarray:
        # generic (transposing) path used when numba is unavailable
        n = values.shape[axis]
        coeffs = self.sweeps[axis]
        a_off = np.full(n - 1, coeffs["a_off"])
        factors = tridiag.TridiagonalFactors(
            w=coeffs["w"], diag_mod=coeffs["dm"], upper=a_off
        )
        b_off = np.full(n - 1, coeffs["b_off"])
        rhs = tridiag.matvec(b_off, np.full(n, coeffs["b_diag"]), b_off, values, axis)
        return tridiag.solve(factors, rhs, axis, threads)

    def _run_chunked(self, kernel, args, values, rhs, batch: int, threads: int) -> None:
        if threads <= 1 or batch < 2 * threads:
            kernel(values, rhs, *args, 0, batch)
            return
        bounds = np.linspace(0, batch, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            jobs = [
                pool.submit(kernel, values, rhs, *args, int(bounds[t]), int(bounds[t + 1]))
                for t in range(threads)
            ]
            for job in jobs:
                job.result()

    def cn_sweeps(self, values: np.ndarray, threads: int = 1, buf: np.ndarray | None = None) -> np.ndarray:
        if not adi_kernels.AVAILABLE:
            for axis in range(3):
                values = self._sweep_fallback(axis, values, threads)
            return np.ascontiguousarray(values)
        values = np.ascontiguousarray(values, dtype=self.dtype)
        rhs = np.empty_like(values) if buf is None else buf
        nx, ny, nz = values.shape
        kernels = (adi_kernels.sweep_axis0, adi_kernels.sweep_axis1, adi_kernels.sweep_axis2)
        batches = (ny * nz, nx, nx)
        for axis in range(3):
            coeffs = self.sweeps[axis]
            args = (coeffs["w"], coeffs["dm"], coeffs["a_off"], coeffs["b_off"], coeffs["b_diag"])
            if axis == 0:
                self._run_chunked(
                    kernels[0], args,
                    values.reshape(nx, -1), rhs.reshape(nx, -1), batches[0], threads,
                )
            else:
                self._run_chunked(kernels[axis], args, values, rhs, batches[axis], threads)
            values, rhs = rhs, values
        return values

    def step(self, values: np.ndarray, threads: int = 1, buf: np.ndarray | None = None) -> np.ndarray:
        """One Strang step. `values` must be an owned, writable, contiguous
        array of the stepper dtype; it is consumed (used as scratch)."""
        if self.mode is TimeMode.IMAGINARY:
            # frozen step-start density for both half-factors: the splitting
            # stays symmetric at the fixed point, so the converged chemical
            # potential is O(dt^2) accurate
            if adi_kernels.AVAILABLE and values.flags.c_contiguous and values.flags.writeable:
                if self._factor_buf is None:
                    self._factor_buf = np.empty(values.shape, dtype=float)
                adi_kernels.build_half_factor(
                    values.ravel(), self.v.ravel(), self.c3, self.c5, self.phase,
                    self._factor_buf.ravel(),
                )
                factor = self._factor_buf
            else:
                factor = self.half_factor(values)
            values *= factor
            out = self.cn_sweeps(values, threads, buf)
            out *= factor
            flat = out.ravel()
            norm = np.real(np.vdot(flat, flat)) * self.config.grid.cell_volume
            out *= 1.0 / np.sqrt(norm)
            return out
        # real time: instantaneous density, each half-factor integrating its
        # sub-flow exactly
        values = self.multiplier(values)
        out = self.cn_sweeps(values, threads, buf)
        return self.multiplier(out)


def step_3d(psi: Wavefunction3D, config: SolverConfig3D, mode: TimeMode, threads: int = 1) -> Wavefunction3D:
    """Advance one Strang-split ADI step (renormalized in imaginary mode)."""
    if psi.grid != config.grid:
        raise ValueError("wavefunction and config use different grids")
    if mode is TimeMode.IMAGINARY and np.all(psi.values.imag == 0.0):
        values = psi.values.real.copy()
    else:
        values = psi.values.copy()
    stepper = _Stepper3D(config, mode, values.dtype)
    out = stepper.step(np.ascontiguousarray(values, dtype=stepper.dtype), threads)
    if not np.all(np.isfinite(out)):
        raise DivergenceError("3D field became non-finite during a step")
    return Wavefunction3D(config.grid, out)


def _energy_mu_terms(values: np.ndarray, grid: Grid3D, couplings: CouplingParams):
    rho = np.abs(values) ** 2 if np.iscomplexobj(values) else values * values
    if adi_kernels.AVAILABLE:
        kinetic = float(adi_kernels.kinetic_quadform(
            np.ascontiguousarray(values),
            1.0 / grid.axial.spacing**2,
            1.0 / grid.transverse.spacing**2,
        ))
    else:
        lap = second_difference(values, grid.axial.spacing, axis=0)
        lap += second_difference(values, grid.transverse.spacing, axis=1)
        lap += second_difference(values, grid.transverse.spacing, axis=2)
        kinetic = -0.5 * float(np.real(np.vdot(values, lap)))
    flat_rho = rho.ravel()
    potential = float(np.dot(_potential_3d(grid, couplings.lam).ravel(), flat_rho))
    quartic = float(np.dot(flat_rho, flat_rho))
    sextic = float(np.dot(flat_rho * flat_rho, flat_rho))
    return kinetic, potential, quartic, sextic


def energy_3d(psi: Wavefunction3D, couplings: CouplingParams) -> float:
    """Discrete energy, integral of 0.5|grad psi|^2 + V|psi|^2
    + pi*g3*|psi|^4 + pi^2*g5*|psi|^6."""
    kin, pot, quart, sext = _energy_mu_terms(psi.values, psi.grid, couplings)
    vol = psi.grid.cell_volume
    return (kin + pot + 0.5 * CUBIC_PREFACTOR * couplings.g3 * quart
            + QUINTIC_PREFACTOR * couplings.g5 * sext / 3.0) * vol


def chemical_potential_3d(psi: Wavefunction3D, couplings: CouplingParams) -> float:
    kin, pot, quart, sext = _energy_mu_terms(psi.values, psi.grid, couplings)
    vol = psi.grid.cell_volume
    return (kin + pot + CUBIC_PREFACTOR * couplings.g3 * quart
            + QUINTIC_PREFACTOR * couplings.g5 * sext) * vol


def gaussian_ansatz_3d(grid: Grid3D, sigma: float, axial_values: np.ndarray) -> Wavefunction3D:
    """Separable field: transverse Gaussian of width sigma times the given
    axial samples, i.e. exp(-(y^2+z^2)/(2 sigma^2))/(sqrt(pi) sigma) * phi(x)."""
    t = grid.transverse.nodes
    transverse = np.exp(-0.5 * (t[:, None] ** 2 + t[None, :] ** 2) / sigma**2) / (np.sqrt(np.pi) * sigma)
    return Wavefunction3D(grid, np.asarray(axial_values)[:, None, None] * transverse[None, :, :])


def ground_state_3d(config: SolverConfig3D, threads: int = 1) -> GroundStateResult3D:
    """Imaginary-time ground-state search from the separable guess (unit-width
    transverse Gaussian times the axial harmonic Gaussian)."""
    grid = config.grid
    lam = config.couplings.lam
    if lam <= 0.0:
        raise ValueError("3D ground-state search needs lam > 0")
    x = grid.axial.nodes
    t = grid.transverse.nodes
    axial = np.exp(-0.5 * lam * x**2)
    transverse = np.exp(-0.5 * (t[:, None] ** 2 + t[None, :] ** 2))
    values = axial[:, None, None] * transverse[None, :, :]
    values /= np.sqrt(np.sum(values**2) * grid.cell_volume)

    stepper = _Stepper3D(config, TimeMode.IMAGINARY, values.dtype)
    values = np.ascontiguousarray(values, dtype=stepper.dtype)
    scratch = np.empty_like(values)
    inv_hx2 = 1.0 / grid.axial.spacing**2
    inv_ht2 = 1.0 / grid.transverse.spacing**2
    mu_prev = np.inf
    mu = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        out = stepper.step(values, threads, buf=scratch)
        scratch = values if out is not values else scratch
        values = out
        if adi_kernels.AVAILABLE:
            kin = adi_kernels.kinetic_quadform(values, inv_hx2, inv_ht2)
            pot, quart, sext = adi_kernels.interaction_sums(values.ravel(), stepper.v.ravel())
        else:
            kin, pot, quart, sext = _energy_mu_terms(values, grid, config.couplings)
        mu = (kin + pot + stepper.c3 * quart + stepper.c5 * sext) * grid.cell_volume
        if not np.isfinite(mu):
            raise DivergenceError(f"3D chemical potential became non-finite at iteration {iterations}")
        if abs(mu - mu_prev) < config.mu_tol:
            converged = True
            break
        mu_prev = mu

    psi = Wavefunction3D(grid, values)
    return GroundStateResult3D(
        wavefunction=psi,
        mu=float(mu),
        energy=energy_3d(psi, config.couplings),
        iterations=iterations,
        converged=converged,
    )


def project_axial(psi: Wavefunction3D) -> AxialProfile:
    """Axial density profile rho(x), the transverse integral of |psi|^2."""
    h_t = psi.grid.transverse.spacing
    density = psi.density().sum(axis=(1, 2)) * h_t**2
    return AxialProfile(grid=psi.grid.axial, density=density)


def transverse_width_profile(psi: Wavefunction3D, density_floor: float = 1e-10) -> np.ndarray:
    """Second-moment transverse width sigma^2(x) =
    integral (y^2+z^2)|psi|^2 dy dz / rho(x); NaN where rho(x) is below the
    floor. Equals sigma^2 exactly for the Gaussian product field."""
    grid = psi.grid
    t = grid.transverse.nodes
    r2 = t[None, :, None] ** 2 + t[None, None, :] ** 2
    rho3 = psi.density()
    h_t = grid.transverse.spacing
    axial_density = rho3.sum(axis=(1, 2)) * h_t**2
    moment = (rho3 * r2).sum(axis=(1, 2)) * h_t**2
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(axial_density >= density_floor, moment / axial_density, np.nan)
    return s
