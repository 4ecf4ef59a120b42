"""Mean-field terms of the effective 1D models and the shared energy functional.

Three interchangeable 1D models are supported:

* NP_GENERAL     - nonpolynomial multiplier (1+s^2)/(2s) + a3/s + a5/s^2 with
                   s the width-cubic root at the local density;
* NPSE_CUBIC     - its g5 = 0 specialization (1 + 1.5*a3)/sqrt(1+a3);
* CQ_POLYNOMIAL  - weak-coupling polynomial 1 + a3 + a5, where the constant 1
                   absorbs the transverse ground-state energy so all three
                   models share the same bare axial potential.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grids import Wavefunction1D, axial_potential, second_difference
from .width import DensityArgs, InvalidRegionError, solve_width_arrays

__all__ = [
    "ModelKind",
    "NonlinearModel",
    "np_general",
    "np_general_cardano",
    "np_cubic",
    "np_poly",
    "matched_g3",
    "mean_field_multiplier",
    "nonlinear_energy_density",
    "energy_1d",
]


class ModelKind(Enum):
    NP_GENERAL = "np"
    NPSE_CUBIC = "npse-cubic"
    CQ_POLYNOMIAL = "cq-poly"


@dataclass(frozen=True)
class NonlinearModel:
    """Selector for the 1D mean-field term together with its couplings."""

    kind: ModelKind
    g3: float = 0.0
    g5: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.g3) and np.isfinite(self.g5)):
            raise ValueError("couplings must be finite")
        if self.kind is ModelKind.NPSE_CUBIC and self.g5 != 0.0:
            raise ValueError("the cubic-only model requires g5 = 0")


def _raise_invalid(bad: np.ndarray, a3: np.ndarray, a5: np.ndarray, positions=None) -> None:
    index = int(np.argmax(bad))
    count = int(np.count_nonzero(bad))
    where = f"index {index}"
    if positions is not None:
        where += f" (x = {np.asarray(positions).ravel()[index]:.6g})"
    raise InvalidRegionError(
        f"width cubic has no positive root at {count} point(s); first at {where} "
        f"with a3 = {a3.ravel()[index]:.6g}, a5 = {a5.ravel()[index]:.6g} "
        "(collapse or out-of-range couplings)"
    )


def _np_general_arrays(a3, a5, positions=None) -> np.ndarray:
    a3 = np.asarray(a3, dtype=float)
    a5 = np.asarray(a5, dtype=float)
    s = solve_width_arrays(a3, a5)
    bad = np.isnan(s)
    if np.any(bad):
        _raise_invalid(bad, a3, a5, positions)
    return (1.0 + s * s) / (2.0 * s) + a3 / s + a5 / (s * s)


def np_general(args: DensityArgs) -> float:
    """Nonpolynomial mean-field multiplier at the width-cubic stationary point."""
    return float(_np_general_arrays(args.a3, args.a5))


def np_general_cardano(args: DensityArgs) -> float:
    """Closed-form multiplier evaluated through the radical intermediates

        B = (18*a5 + 3*sqrt(A))^(1/3),  C = B^2 + 3*(1+a3),
        A = 36*a5^2 - 3*(1+a3)^3,

    on the principal complex branch (A < 0 over the weak-coupling region, so
    the intermediates are genuinely complex there). Equals np_general to
    round-off; kept as an independent evaluation route.
    """
    a3, a5 = args.a3, args.a5
    if np.isnan(float(solve_width_arrays(a3, a5))):
        _raise_invalid(np.array([True]), np.asarray([a3]), np.asarray([a5]))
    one_plus = 1.0 + a3
    radicand = 36.0 * a5 * a5 - 3.0 * one_plus**3
    b = (18.0 * a5 + 3.0 * np.sqrt(complex(radicand))) ** (1.0 / 3.0)
    c = b * b + 3.0 * one_plus
    numerator = (3.0 + c * c / (3.0 * b * b)) * b * c + 6.0 * b * (a3 * c + 3.0 * a5 * b)
    return float((numerator / (2.0 * c * c)).real)


def np_cubic(a3: float) -> float:
    """Cubic-only multiplier (1 + 1.5*a3)/sqrt(1+a3); collapses at a3 <= -1."""
    if a3 <= -1.0:
        raise InvalidRegionError(f"cubic-only multiplier collapses for a3 <= -1, got {a3}")
    return (1.0 + 1.5 * a3) / np.sqrt(1.0 + a3)


def np_poly(args: DensityArgs) -> float:
    """Weak-coupling polynomial multiplier 1 + a3 + a5."""
    return 1.0 + args.a3 + args.a5


def matched_g3(g5: float, peak_density: float) -> float:
    """Two-body coupling that matches the nonpolynomial and polynomial models
    at the density peak: g3 = -(4/3)*g5*max|phi|^2."""
    if peak_density < 0.0:
        raise ValueError(f"peak density must be >= 0, got {peak_density}")
    return -(4.0 / 3.0) * g5 * peak_density


def mean_field_multiplier(model: NonlinearModel, density, positions=None) -> np.ndarray:
    """Pointwise mean-field multiplier of the chosen model at the given
    density. `positions` is only used to report the offending location when
    the couplings leave the valid region."""
    rho = np.asarray(density, dtype=float)
    a3 = model.g3 * rho
    if model.kind is ModelKind.NP_GENERAL:
        return _np_general_arrays(a3, model.g5 * rho * rho, positions)
    if model.kind is ModelKind.NPSE_CUBIC:
        bad = a3 <= -1.0
        if np.any(bad):
            _raise_invalid(bad, a3, np.zeros_like(a3), positions)
        return (1.0 + 1.5 * a3) / np.sqrt(1.0 + a3)
    return 1.0 + a3 + model.g5 * rho * rho


def nonlinear_energy_density(model: NonlinearModel, density, positions=None) -> np.ndarray:
    """Pointwise nonlinear energy density e_nl(rho).

    For the nonpolynomial models this is

        (1/(2s) + s/2)*rho + a3*rho/(2s) + a5*rho/(3s^2)

    with s at its stationary point; for the polynomial model it is
    rho + g3*rho^2/2 + g5*rho^3/3.
    """
    rho = np.asarray(density, dtype=float)
    a3 = model.g3 * rho
    if model.kind is ModelKind.CQ_POLYNOMIAL:
        return rho + 0.5 * model.g3 * rho**2 + model.g5 * rho**3 / 3.0
    a5 = model.g5 * rho * rho
    s = solve_width_arrays(a3, a5)
    bad = np.isnan(s)
    if np.any(bad):
        _raise_invalid(bad, a3, a5, positions)
    return (0.5 / s + 0.5 * s) * rho + 0.5 * a3 * rho / s + a5 * rho / (3.0 * s * s)


def energy_1d(phi: Wavefunction1D, model: NonlinearModel, lam: float) -> float:
    """Discrete energy functional

        E = integral of 0.5*|dphi/dx|^2 + V(x)*|phi|^2 + e_nl(|phi|^2)

    using the same three-point stencil as the propagators."""
    grid = phi.grid
    values = phi.values
    rho = phi.density()
    kinetic = -0.5 * np.real(
        np.vdot(values, second_difference(values, grid.spacing))
    )
    potential = np.sum(axial_potential(grid.nodes, lam) * rho)
    nonlinear = np.sum(nonlinear_energy_density(model, rho, grid.nodes))
    return float((kinetic + potential + nonlinear) * grid.cell_volume)
