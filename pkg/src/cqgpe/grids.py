"""Grids, wavefunctions, couplings and shared observables.

Everything is dimensionless: the transverse trap frequency and oscillator
length are 1, wavefunctions carry unit norm, and the coupling constants are
the only intensity knobs. Boxes use homogeneous Dirichlet edges and are sized
so the boundary density is negligible; integrals use the rectangle rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid1D",
    "Grid3D",
    "Wavefunction1D",
    "Wavefunction3D",
    "CouplingParams",
    "norm_sq",
    "normalize",
    "axial_potential",
    "second_difference",
]

MIN_POINTS = 16
# transverse box must keep the unit-width noninteracting Gaussian below 1e-8
# in amplitude at the wall
MIN_TRANSVERSE_HALF_WIDTH = 6.0


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [-half_width, half_width], endpoints included."""

    half_width: float
    points: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.half_width) and self.half_width > 0.0):
            raise ValueError(f"half_width must be finite and positive, got {self.half_width}")
        if self.points < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} points, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        # built symmetric about the origin so that x = 0 is hit exactly
        # whenever the point count is odd
        x = (np.arange(self.points) - 0.5 * (self.points - 1)) * self.spacing
        x.flags.writeable = False
        return x

    @property
    def cell_volume(self) -> float:
        return self.spacing


@dataclass(frozen=True)
class Grid3D:
    """Axial grid along x plus an identical transverse grid for y and z."""

    axial: Grid1D
    transverse_half_width: float
    transverse_points: int

    def __post_init__(self) -> None:
        if self.transverse_half_width < MIN_TRANSVERSE_HALF_WIDTH:
            raise ValueError(
                "transverse half-width must be >= "
                f"{MIN_TRANSVERSE_HALF_WIDTH} so the unit transverse Gaussian "
                "is negligible at the wall"
            )
        if self.transverse_points < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} transverse points")

    @cached_property
    def transverse(self) -> Grid1D:
        return Grid1D(self.transverse_half_width, self.transverse_points)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.axial.points, self.transverse_points, self.transverse_points)

    @property
    def cell_volume(self) -> float:
        return self.axial.spacing * self.transverse.spacing**2


def _validated_field(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=complex, copy=True)
    if arr.shape != shape:
        raise ValueError(f"field shape {arr.shape} does not match grid shape {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field contains non-finite samples")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Wavefunction1D:
    """Complex field samples on a Grid1D. Immutable once constructed."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _validated_field(self.values, (self.grid.points,)))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class Wavefunction3D:
    """Complex field samples on a Grid3D. Immutable once constructed."""

    grid: Grid3D
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _validated_field(self.values, self.grid.shape))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class CouplingParams:
    """Two-body (g3) and three-body (g5) couplings plus axial trap strength."""

    g3: float
    g5: float
    lam: float

    def __post_init__(self) -> None:
        for name in ("g3", "g5", "lam"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.lam < 0.0:
            raise ValueError("axial trap strength must be >= 0")


def norm_sq(wavefunction: Wavefunction1D | Wavefunction3D) -> float:
    """Rectangle-rule squared norm, sum(|field|^2) * cell volume."""
    values = wavefunction.values
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains non-finite samples")
    return float(np.sum(np.abs(values) ** 2) * wavefunction.grid.cell_volume)


def normalize(wavefunction: Wavefunction1D | Wavefunction3D):
    """Rescale to unit norm. Raises on a zero field."""
    n2 = norm_sq(wavefunction)
    if n2 <= 0.0:
        raise ValueError("cannot normalize a zero field")
    return type(wavefunction)(wavefunction.grid, wavefunction.values / np.sqrt(n2))


def axial_potential(x, lam: float):
    """Weak longitudinal confinement (lam*x)^2 / 2."""
    return 0.5 * (lam * np.asarray(x, dtype=float)) ** 2


def second_difference(values: np.ndarray, spacing: float, axis: int = 0) -> np.ndarray:
    """Three-point second difference along an axis with zero ghost values
    beyond both ends (homogeneous Dirichlet convention)."""
    out = -2.0 * values
    dst = np.moveaxis(out, axis, 0)
    src = np.moveaxis(values, axis, 0)
    dst[1:] += src[:-1]
    dst[:-1] += src[1:]
    out /= spacing**2
    return out
