"""Thomas-algorithm tridiagonal solves, batched over the lines of an N-d array.

All lines in one sweep share the same matrix, so the forward-elimination
coefficients are factored once and each solve is a pair of vectorized
substitution sweeps along the requested axis. Splitting the batch across
threads touches disjoint slices and cannot change the result.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = ["TridiagonalFactors", "factorize", "solve", "matvec"]


@dataclass(frozen=True)
class TridiagonalFactors:
    """Precomputed Thomas elimination for a fixed tridiagonal matrix."""

    w: np.ndarray        # lower / pivot multipliers, length n-1
    diag_mod: np.ndarray  # eliminated main diagonal, length n
    upper: np.ndarray    # original upper diagonal, length n-1

    @property
    def n(self) -> int:
        return self.diag_mod.size


def factorize(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray) -> TridiagonalFactors:
    """Factor a tridiagonal matrix given lower (n-1), main (n), upper (n-1)
    diagonals. No pivoting; intended for the diagonally dominant
    Crank-Nicolson matrices."""
    lower = np.asarray(lower)
    diag = np.asarray(diag)
    upper = np.asarray(upper)
    n = diag.size
    if lower.size != n - 1 or upper.size != n - 1:
        raise ValueError("off-diagonals must have length n-1")
    w = np.empty(n - 1, dtype=np.result_type(lower, diag, upper))
    diag_mod = np.empty(n, dtype=w.dtype)
    diag_mod[0] = diag[0]
    for i in range(1, n):
        w[i - 1] = lower[i - 1] / diag_mod[i - 1]
        diag_mod[i] = diag[i] - w[i - 1] * upper[i - 1]
    return TridiagonalFactors(w=w, diag_mod=diag_mod, upper=upper)


def _solve_lines(factors: TridiagonalFactors, work: np.ndarray) -> None:
    """In-place solve on work of shape (n, ...): forward elimination then
    back substitution, vectorized over the trailing dimensions."""
    w, diag_mod, upper = factors.w, factors.diag_mod, factors.upper
    n = factors.n
    for i in range(1, n):
        work[i] -= w[i - 1] * work[i - 1]
    work[n - 1] /= diag_mod[n - 1]
    for i in range(n - 2, -1, -1):
        work[i] = (work[i] - upper[i] * work[i + 1]) / diag_mod[i]


def solve(factors: TridiagonalFactors, rhs: np.ndarray, axis: int = 0, threads: int = 1) -> np.ndarray:
    """Solve the factored system along `axis` of `rhs` for every line at once."""
    moved = np.moveaxis(np.asarray(rhs), axis, 0)
    if moved.shape[0] != factors.n:
        raise ValueError(f"axis length {moved.shape[0]} does not match system size {factors.n}")
    work = np.array(moved, dtype=np.result_type(moved, factors.diag_mod), copy=True, order="C")
    flat = work.reshape(factors.n, -1)
    if threads <= 1 or flat.shape[1] < 2 * threads:
        _solve_lines(factors, flat)
    else:
        bounds = np.linspace(0, flat.shape[1], threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = [flat[:, bounds[k]: bounds[k + 1]] for k in range(threads)]
            list(pool.map(lambda chunk: _solve_lines(factors, chunk), chunks))
    return np.moveaxis(work, 0, axis)


def matvec(lower, diag, upper, values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Tridiagonal matrix-vector product along `axis` (zero ghost values)."""
    moved = np.moveaxis(np.asarray(values), axis, 0)
    shape = [1] * moved.ndim
    shape[0] = -1
    out = np.asarray(diag).reshape(shape) * moved
    out[1:] += np.asarray(lower).reshape([-1] + shape[1:]) * moved[:-1]
    out[:-1] += np.asarray(upper).reshape([-1] + shape[1:]) * moved[1:]
    return np.moveaxis(out, 0, axis)
