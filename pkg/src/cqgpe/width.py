"""Transverse-width algebra for the cigar-shaped condensate.

The square of the transverse width, s = sigma^2, solves the cubic

    s^3 - s*(1 + a3) - (4/3)*a5 = 0,

where a3 = g3*|phi|^2 and a5 = g5*|phi|^4 are the density-weighted couplings.
The physically meaningful branch is the real positive root continuously
connected to s = 1 at zero coupling; when several positive roots exist this
is the largest one. The closed-form radical solution passes through complex
intermediates wherever the cubic has three real roots (the discriminant
quantity 36*a5^2 - 3*(1+a3)^3 is negative throughout the weak-coupling
region), so the root is evaluated with the equivalent triple-angle form there
and polished by Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

__all__ = [
    "InvalidRegionError",
    "WidthStatus",
    "DensityArgs",
    "WidthSolution",
    "WidthTable",
    "cubic_residual",
    "solve_width",
    "solve_width_arrays",
    "weak_width",
    "classify_region",
    "width_map",
]

_FOUR_THIRDS = 4.0 / 3.0


class InvalidRegionError(ValueError):
    """The width cubic has no real positive root at the given couplings."""


class WidthStatus(Enum):
    VALID = "valid"
    NO_POSITIVE_ROOT = "no-positive-root"


@dataclass(frozen=True)
class DensityArgs:
    """Density-weighted couplings a3 = g3*|phi|^2, a5 = g5*|phi|^4."""

    a3: float
    a5: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a3) and np.isfinite(self.a5)):
            raise ValueError("density arguments must be finite")


@dataclass(frozen=True)
class WidthSolution:
    """Root of the width cubic; s is NaN when status is NO_POSITIVE_ROOT."""

    s: float
    status: WidthStatus
    residual: float


def cubic_residual(s, a3, a5):
    """Left side of the width cubic, zero at a root."""
    s = np.asarray(s, dtype=float)
    return s**3 - s * (1.0 + np.asarray(a3)) - _FOUR_THIRDS * np.asarray(a5)


def _trig_root(p, q):
    # triple-angle form for the casus irreducibilis (three real roots,
    # p <= 0 there); the k = 0 branch is the largest root
    m = 2.0 * np.sqrt(np.maximum(-p / 3.0, 0.0))
    denom = p * m
    safe = np.where(denom != 0.0, denom, 1.0)
    cos3t = np.where(denom != 0.0, 3.0 * q / safe, 0.0)
    theta = np.arccos(np.clip(cos3t, -1.0, 1.0)) / 3.0
    return m * np.cos(theta)


def _radical_root(q, h):
    # single real root: radical form with real (signed) cube roots
    root_h = np.sqrt(np.maximum(h, 0.0))
    return np.cbrt(-0.5 * q + root_h) + np.cbrt(-0.5 * q - root_h)


def _roots_numpy(a3: np.ndarray, a5: np.ndarray) -> np.ndarray:
    p = -(1.0 + a3)
    q = -_FOUR_THIRDS * a5
    h = 0.25 * q * q + p * p * p / 27.0

    three_real = h <= 0.0
    if three_real.all():
        s = _trig_root(p, q)
    elif not three_real.any():
        s = _radical_root(q, h)
    else:
        s = np.where(three_real, _trig_root(p, q), _radical_root(q, h))

    # Newton polish; frozen near double roots where the seed is already as
    # good as the conditioning allows
    for _ in range(2):
        s2 = s * s
        f = s2 * s + p * s + q
        fp = 3.0 * s2 + p
        safe = np.abs(fp) > 1e-8
        s = s - np.where(safe, f, 0.0) / np.where(safe, fp, 1.0)

    return np.where(s > 0.0, s, np.nan)


if numba is not None:

    @numba.njit(cache=True)
    def _roots_kernel(a3: np.ndarray, a5: np.ndarray) -> np.ndarray:  # pragma: no cover
        out = np.empty(a3.size)
        for i in range(a3.size):
            p = -(1.0 + a3[i])
            q = -_FOUR_THIRDS * a5[i]
            h = 0.25 * q * q + p * p * p / 27.0
            if h <= 0.0:
                mp = -p / 3.0
                m = 2.0 * math.sqrt(mp if mp > 0.0 else 0.0)
                denom = p * m
                if denom != 0.0:
                    c = 3.0 * q / denom
                    c = min(1.0, max(-1.0, c))
                else:
                    c = 0.0
                s = m * math.cos(math.acos(c) / 3.0)
            else:
                root_h = math.sqrt(h)
                u = -0.5 * q + root_h
                v = -0.5 * q - root_h
                s = math.copysign(abs(u) ** (1.0 / 3.0), u) + math.copysign(abs(v) ** (1.0 / 3.0), v)
            for _ in range(2):
                s2 = s * s
                fp = 3.0 * s2 + p
                if abs(fp) > 1e-8:
                    s -= (s2 * s + p * s + q) / fp
            out[i] = s if s > 0.0 else np.nan
        return out


def solve_width_arrays(a3, a5) -> np.ndarray:
    """Vectorized width solve. Returns s = sigma^2 elementwise, NaN where the
    cubic has no real positive root.

    The cubic is depressed (no quadratic term), with p = -(1+a3) and
    q = -(4/3)*a5. Three real roots exist iff q^2/4 + p^3/27 <= 0; the largest
    is then 2*sqrt(-p/3)*cos(theta/3) with cos(3*theta) = 3q/(p*m). Otherwise
    the single real root comes from the radical form. Either seed is polished
    with two Newton steps to push the residual to round-off.
    """
    a3 = np.asarray(a3, dtype=float)
    a5 = np.asarray(a5, dtype=float)
    if a3.shape != a5.shape:
        a3, a5 = np.broadcast_arrays(a3, a5)
    if numba is not None:
        return _roots_kernel(np.ascontiguousarray(a3).ravel(), np.ascontiguousarray(a5).ravel()).reshape(a3.shape)
    return _roots_numpy(a3, a5)


def solve_width(args: DensityArgs) -> WidthSolution:
    """Real positive root of the width cubic on the branch connected to s = 1."""
    s = float(solve_width_arrays(args.a3, args.a5))
    if np.isnan(s):
        return WidthSolution(s=float("nan"), status=WidthStatus.NO_POSITIVE_ROOT, residual=float("nan"))
    return WidthSolution(
        s=s,
        status=WidthStatus.VALID,
        residual=float(cubic_residual(s, args.a3, args.a5)),
    )


def weak_width(args: DensityArgs) -> float:
    """First-order weak-coupling width sigma ~ 1 + a3/4 + a5/3.

    Note this approximates sigma itself, not s = sigma^2.
    """
    return 1.0 + 0.25 * args.a3 + args.a5 / 3.0


def classify_region(args: DensityArgs) -> WidthStatus:
    """VALID iff the width cubic has a real positive root at these couplings."""
    s = float(solve_width_arrays(args.a3, args.a5))
    return WidthStatus.NO_POSITIVE_ROOT if np.isnan(s) else WidthStatus.VALID


@dataclass(frozen=True)
class WidthTable:
    """Row-major table of width solutions over a coupling-plane rectangle.

    Flat arrays with a3 varying slowest; s is NaN on invalid rows.
    """

    a3: np.ndarray
    a5: np.ndarray
    s: np.ndarray
    valid: np.ndarray

    def __len__(self) -> int:
        return self.a3.size

    def rows(self):
        for i in range(len(self)):
            yield (
                float(self.a3[i]),
                float(self.a5[i]),
                float(self.s[i]),
                WidthStatus.VALID if self.valid[i] else WidthStatus.NO_POSITIVE_ROOT,
            )


def width_map(a3_range, a5_range, resolution: int) -> WidthTable:
    """Evaluate the width solve on a resolution x resolution grid of couplings.

    Deterministic row-major output; rows may be recomputed in any order.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    a3_lo, a3_hi = (float(v) for v in a3_range)
    a5_lo, a5_hi = (float(v) for v in a5_range)
    for v in (a3_lo, a3_hi, a5_lo, a5_hi):
        if not np.isfinite(v):
            raise ValueError("width map ranges must be finite")
    a3_axis = np.linspace(a3_lo, a3_hi, resolution)
    a5_axis = np.linspace(a5_lo, a5_hi, resolution)
    a3_grid, a5_grid = np.meshgrid(a3_axis, a5_axis, indexing="ij")
    a3_flat = a3_grid.ravel()
    a5_flat = a5_grid.ravel()
    s = solve_width_arrays(a3_flat, a5_flat)
    return WidthTable(a3=a3_flat, a5=a5_flat, s=s, valid=~np.isnan(s))
