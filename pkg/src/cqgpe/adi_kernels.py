"""Fused Crank-Nicolson line sweeps for 3D fields in their native C layout.

Each kernel applies (I - zK) along one axis and immediately solves the
factored (I + zK) system for every line, writing into a caller-provided
buffer. Loops are ordered so the innermost index is always the contiguous
one; no transposes are made. The kernels release the GIL and operate on a
caller-chosen slab of the batch dimension, so thread-parallel execution over
disjoint slabs is deterministic.

Thomas precomputation for the constant-coefficient matrix with main diagonal
b and off-diagonal a: dm[0] = b, w[i] = a/dm[i], dm[i+1] = b - w[i]*a.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

__all__ = ["AVAILABLE", "factor_constant", "sweep_axis0", "sweep_axis1", "sweep_axis2"]

AVAILABLE = numba is not None


def factor_constant(off, diag, n: int):
    """Thomas factors (w, dm) for the constant tridiagonal (off, diag, off)."""
    dtype = np.result_type(type(off), type(diag))
    w = np.empty(n - 1, dtype=dtype)
    dm = np.empty(n, dtype=dtype)
    dm[0] = diag
    for i in range(1, n):
        w[i - 1] = off / dm[i - 1]
        dm[i] = diag - w[i - 1] * off
    return w, dm


if AVAILABLE:

    @numba.njit(cache=True, nogil=True)
    def sweep_axis0(values, rhs, w, dm, off, b_off, b_diag, j0, j1):  # pragma: no cover
        """values/rhs viewed as (n, m); sweep along axis 0 for columns [j0, j1)."""
        n = values.shape[0]
        for j in range(j0, j1):
            rhs[0, j] = b_diag * values[0, j] + b_off * values[1, j]
        for i in range(1, n - 1):
            for j in range(j0, j1):
                rhs[i, j] = b_diag * values[i, j] + b_off * (values[i - 1, j] + values[i + 1, j])
        for j in range(j0, j1):
            rhs[n - 1, j] = b_diag * values[n - 1, j] + b_off * values[n - 2, j]
        for i in range(1, n):
            wi = w[i - 1]
            for j in range(j0, j1):
                rhs[i, j] -= wi * rhs[i - 1, j]
        inv = 1.0 / dm[n - 1]
        for j in range(j0, j1):
            rhs[n - 1, j] *= inv
        for i in range(n - 2, -1, -1):
            oi = off
            dmi = dm[i]
            for j in range(j0, j1):
                rhs[i, j] = (rhs[i, j] - oi * rhs[i + 1, j]) / dmi

    @numba.njit(cache=True, nogil=True)
    def sweep_axis1(values, rhs, w, dm, off, b_off, b_diag, i0, i1):  # pragma: no cover
        """values/rhs shaped (nx, ny, nz); sweep along axis 1 for planes [i0, i1)."""
        ny = values.shape[1]
        nz = values.shape[2]
        for i in range(i0, i1):
            for k in range(nz):
                rhs[i, 0, k] = b_diag * values[i, 0, k] + b_off * values[i, 1, k]
            for j in range(1, ny - 1):
                for k in range(nz):
                    rhs[i, j, k] = b_diag * values[i, j, k] + b_off * (
                        values[i, j - 1, k] + values[i, j + 1, k]
                    )
            for k in range(nz):
                rhs[i, ny - 1, k] = b_diag * values[i, ny - 1, k] + b_off * values[i, ny - 2, k]
            for j in range(1, ny):
                wj = w[j - 1]
                for k in range(nz):
                    rhs[i, j, k] -= wj * rhs[i, j - 1, k]
            inv = 1.0 / dm[ny - 1]
            for k in range(nz):
                rhs[i, ny - 1, k] *= inv
            for j in range(ny - 2, -1, -1):
                dmj = dm[j]
                for k in range(nz):
                    rhs[i, j, k] = (rhs[i, j, k] - off * rhs[i, j + 1, k]) / dmj

    @numba.njit(cache=True, nogil=True)
    def sweep_axis2(values, rhs, w, dm, off, b_off, b_diag, i0, i1):  # pragma: no cover
        """values/rhs shaped (nx, ny, nz); sweep along the contiguous axis 2."""
        ny = values.shape[1]
        nz = values.shape[2]
        for i in range(i0, i1):
            for j in range(ny):
                rhs[i, j, 0] = b_diag * values[i, j, 0] + b_off * values[i, j, 1]
                for k in range(1, nz - 1):
                    rhs[i, j, k] = b_diag * values[i, j, k] + b_off * (
                        values[i, j, k - 1] + values[i, j, k + 1]
                    )
                rhs[i, j, nz - 1] = b_diag * values[i, j, nz - 1] + b_off * values[i, j, nz - 2]
                for k in range(1, nz):
                    rhs[i, j, k] -= w[k - 1] * rhs[i, j, k - 1]
                rhs[i, j, nz - 1] /= dm[nz - 1]
                for k in range(nz - 2, -1, -1):
                    rhs[i, j, k] = (rhs[i, j, k] - off * rhs[i, j, k + 1]) / dm[k]

    @numba.njit(cache=True, nogil=True)
    def kinetic_quadform(values, inv_hx2, inv_ht2):  # pragma: no cover
        """Real part of <v| -0.5*Laplacian |v> (zero ghosts, unit cell volume)."""
        nx, ny, nz = values.shape
        acc = 0.0
        for i in range(nx):
            for j in range(ny):
                for k in range(nz):
                    v = values[i, j, k]
                    lap = -2.0 * v * (inv_hx2 + 2.0 * inv_ht2)
                    if i > 0:
                        lap += values[i - 1, j, k] * inv_hx2
                    if i < nx - 1:
                        lap += values[i + 1, j, k] * inv_hx2
                    if j > 0:
                        lap += values[i, j - 1, k] * inv_ht2
                    if j < ny - 1:
                        lap += values[i, j + 1, k] * inv_ht2
                    if k > 0:
                        lap += values[i, j, k - 1] * inv_ht2
                    if k < nz - 1:
                        lap += values[i, j, k + 1] * inv_ht2
                    acc += (np.conj(v) * lap).real
        return -0.5 * acc

    @numba.njit(cache=True, nogil=True)
    def apply_multiplier(values, v_pot, c3, c5, phase, i0, i1):  # pragma: no cover
        """In-place values[i] *= exp(phase * (V[i] + c3*rho + c5*rho^2)) on
        flattened views, for indices [i0, i1)."""
        for i in range(i0, i1):
            v = values[i]
            rho = (v * np.conj(v)).real
            w = v_pot[i] + rho * (c3 + c5 * rho)
            values[i] = v * np.exp(phase * w)

    @numba.njit(cache=True, nogil=True)
    def build_half_factor(values, v_pot, c3, c5, phase, out):  # pragma: no cover
        """out[i] = exp(phase * (V[i] + c3*rho + c5*rho^2)) on flattened views."""
        for i in range(values.size):
            v = values[i]
            rho = (v * np.conj(v)).real
            out[i] = np.exp(phase * (v_pot[i] + rho * (c3 + c5 * rho)))

    @numba.njit(cache=True, nogil=True)
    def interaction_sums(values, v_pot):  # pragma: no cover
        """Accumulate (potential, quartic, sextic) moments of the density in
        one pass: sum V*rho, sum rho^2, sum rho^3 (unit cell volume)."""
        pot = 0.0
        quart = 0.0
        sext = 0.0
        for i in range(values.size):
            v = values[i]
            rho = (v * np.conj(v)).real
            rho2 = rho * rho
            pot += v_pot[i] * rho
            quart += rho2
            sext += rho2 * rho
        return pot, quart, sext

else:  # pragma: no cover - exercised only without numba
    sweep_axis0 = sweep_axis1 = sweep_axis2 = None
    kinetic_quadform = apply_multiplier = interaction_sums = build_half_factor = None
