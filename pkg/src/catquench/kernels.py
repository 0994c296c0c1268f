"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Backend selection: set CATQ_BACKEND=numpy to force the fallback, or
CATQ_BACKEND=numba to require the jitted path (import error otherwise).
Default is numba when importable.

The Wigner transform evaluates, per spectral component phi_r of the reduced
oscillator density matrix, the position integral

    W(x, p) = (1/pi) int phi*(x+y) phi(x-y) exp(2ipy) dy

on a symmetric y grid.  Oscillator eigenfunctions are generated by the
stable normalized Hermite-function recurrence, so the cost is
O(points * n_max * rank); the final phase sum is a single complex GEMM.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FORCED = os.environ.get("CATQ_BACKEND", "").strip().lower()

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    if _FORCED == "numba":
        raise

__all__ = ["active_backend", "hermite_components", "wigner_correlation",
           "HAVE_NUMBA"]


def active_backend() -> str:
    if _FORCED == "numpy":
        return "numpy"
    if _FORCED == "numba":
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


def _hermite_components_numpy(points: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Values sum_n coeffs[r, n] h_n(x) for every point x; shape (rank, npts).

    h_n are the L2-normalized oscillator eigenfunctions,
    h_0 = pi^(-1/4) exp(-x^2/2), h_n = x sqrt(2/n) h_{n-1} - sqrt((n-1)/n) h_{n-2}.
    """
    rank, n_levels = coeffs.shape
    x = points
    h_prev = np.zeros_like(x)
    h_curr = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    out = coeffs[:, 0][:, None] * h_curr[None, :]
    for n in range(1, n_levels):
        h_next = x * math.sqrt(2.0 / n) * h_curr - math.sqrt((n - 1) / n) * h_prev
        h_prev, h_curr = h_curr, h_next
        out += coeffs[:, n][:, None] * h_curr[None, :]
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _hermite_components_numba(points, coeffs):  # pragma: no cover - jitted
        rank, n_levels = coeffs.shape
        npts = points.shape[0]
        out = np.zeros((rank, npts), dtype=np.complex128)
        root_pi4 = math.pi ** -0.25
        for i in range(npts):
            x = points[i]
            h_prev = 0.0
            h_curr = root_pi4 * math.exp(-0.5 * x * x)
            for r in range(rank):
                out[r, i] = coeffs[r, 0] * h_curr
            for n in range(1, n_levels):
                h_next = (x * math.sqrt(2.0 / n) * h_curr
                          - math.sqrt((n - 1.0) / n) * h_prev)
                h_prev = h_curr
                h_curr = h_next
                for r in range(rank):
                    out[r, i] += coeffs[r, n] * h_curr
        return out


def hermite_components(points: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Dispatch to the active backend; coeffs is (rank, n_levels) complex."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if active_backend() == "numba":
        return _hermite_components_numba(points, coeffs)
    return _hermite_components_numpy(points, coeffs)


def wigner_correlation(x_axis: np.ndarray, y_axis: np.ndarray,
                       weights: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Mixed autocorrelation F[i, k] = sum_r w_r phi_r*(x_i + y_k) phi_r(x_i - y_k).

    ``y_axis`` must be symmetric about zero (y[k] = -y[Ny-1-k]) so the
    reflected evaluation reuses the same samples.
    """
    nx, ny = len(x_axis), len(y_axis)
    if not np.allclose(y_axis, -y_axis[::-1]):
        raise ValueError("y grid must be symmetric about zero")
    pts = (x_axis[:, None] + y_axis[None, :]).ravel()
    vals = hermite_components(pts, coeffs).reshape(-1, nx, ny)
    flipped = vals[:, :, ::-1]
    f = np.zeros((nx, ny), dtype=np.complex128)
    for r in range(len(weights)):
        f += weights[r] * (vals[r].conj() * flipped[r])
    return f
