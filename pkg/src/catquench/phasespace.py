"""Wigner transform of the reduced oscillator state, purity and negativity.

All grids live in the rescaled coordinates of the model, where the
commutator [q, p] = i/(2jR); the transform is the standard hbar = 1 Wigner
function evaluated at (x, y) = sqrt(2jR) (q, p) and multiplied by the
Jacobian 2jR, so that int W dq dp = 1.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import ExtentError
from .hilbert import ModelParams
from .kernels import wigner_correlation
from .quench import ReducedDensity

__all__ = ["WignerGrid", "wigner", "wigner_from_components", "purity",
           "negativity", "marginals", "default_axes"]

DEFAULT_EXTENT = 1.5
DEFAULT_POINTS = 301


class WignerGrid:
    """Real Wigner samples on a uniform rectangular (q, p) grid."""

    def __init__(self, q_axis: np.ndarray, p_axis: np.ndarray, values: np.ndarray,
                 norm_residual: float, imag_residual: float = 0.0):
        self.q_axis = np.asarray(q_axis, dtype=float)
        self.p_axis = np.asarray(p_axis, dtype=float)
        self.values = np.asarray(values, dtype=float)   # shape (nq, np)
        self.norm_residual = float(norm_residual)
        self.imag_residual = float(imag_residual)
        if self.values.shape != (len(self.q_axis), len(self.p_axis)):
            raise ValueError("value matrix does not match the axes")

    def integrate(self, integrand: np.ndarray | None = None) -> float:
        """Trapezoidal integral over the grid (of W by default)."""
        f = self.values if integrand is None else integrand
        return float(np.trapezoid(np.trapezoid(f, self.p_axis, axis=1), self.q_axis))

    def boundary_tail(self) -> float:
        """|W| mass sitting on the outermost grid cells (extent check)."""
        w = np.abs(self.values)
        dq = self.q_axis[1] - self.q_axis[0]
        dp = self.p_axis[1] - self.p_axis[0]
        edge = (w[0, :].sum() + w[-1, :].sum()) * dq * dp \
            + (w[1:-1, 0].sum() + w[1:-1, -1].sum()) * dq * dp
        return float(edge)


def default_axes(extent: float = DEFAULT_EXTENT,
                 n_points: int = DEFAULT_POINTS) -> tuple[np.ndarray, np.ndarray]:
    ax = np.linspace(-extent, extent, n_points)
    return ax, ax.copy()


def _check_axes(axis: np.ndarray, name: str):
    d = np.diff(axis)
    if len(axis) < 2 or not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ValueError(f"{name} axis must be uniform with >= 2 points")


def _resolution_check(params: ModelParams, q_axis, p_axis):
    """Warn when the grid cannot resolve interference fringes.

    Fringes between packets separated by d in rescaled units have wavelength
    ~ pi / (2jR d); take d ~ half the grid extent as the worst case.
    """
    two_jr = 2.0 * params.j * params.R
    extent = max(q_axis[-1] - q_axis[0], p_axis[-1] - p_axis[0])
    fringe = math.pi / (two_jr * 0.5 * extent)
    step = max(q_axis[1] - q_axis[0], p_axis[1] - p_axis[0])
    if step > 0.5 * fringe:
        need = int(math.ceil(extent / (0.5 * fringe))) + 1
        warnings.warn(
            f"grid step {step:.3g} may undersample fringes of scale {fringe:.3g}; "
            f"suggest >= {need} points per axis", RuntimeWarning, stacklevel=3)


def wigner_from_components(weights: np.ndarray, vectors: np.ndarray,
                           params: ModelParams, q_axis: np.ndarray,
                           p_axis: np.ndarray) -> WignerGrid:
    """Wigner grid of rho = sum_r weights[r] |vectors[:, r]><vectors[:, r]|.

    ``vectors`` holds Fock-basis columns; this is the fast path used by time
    series, where the Schmidt rank is at most 2j+1.
    """
    _check_axes(q_axis, "q")
    _check_axes(p_axis, "p")
    _resolution_check(params, q_axis, p_axis)
    scale = math.sqrt(2.0 * params.j * params.R)
    x_axis = scale * q_axis
    px_axis = scale * p_axis

    n_levels = vectors.shape[0]
    # y grid: support radius of the highest retained eigenfunction plus a
    # Gaussian margin; step resolves the fastest phase 2(|p| + sqrt(2n+1)).
    support = math.sqrt(2.0 * n_levels + 1.0)
    ly = support + 6.0
    omega_max = 2.0 * (support + np.abs(px_axis).max()) + 2.0
    dy = math.pi / omega_max / 2.5
    n_y = 2 * int(math.ceil(ly / dy)) + 1
    y_axis = np.linspace(-ly, ly, n_y)

    f = wigner_correlation(x_axis, y_axis, np.asarray(weights, float),
                           np.ascontiguousarray(vectors.T))
    dy_actual = y_axis[1] - y_axis[0]
    phases = np.exp(2j * np.outer(y_axis, px_axis)) * (dy_actual / math.pi)
    w_std = f @ phases
    imag_residual = float(np.abs(w_std.imag).max())
    if imag_residual > 1e-10:
        warnings.warn(f"Wigner imaginary residue {imag_residual:.2e}",
                      RuntimeWarning, stacklevel=3)
    # rescaled W(q,p) = 2jR * W_std(sqrt(2jR) q, sqrt(2jR) p)
    values = 2.0 * params.j * params.R * w_std.real
    norm_residual = abs(float(np.trapezoid(np.trapezoid(values, p_axis, axis=1), q_axis)) - 1.0)
    return WignerGrid(q_axis, p_axis, values, norm_residual, imag_residual)


def wigner(rho: ReducedDensity, params: ModelParams, q_axis: np.ndarray,
           p_axis: np.ndarray, rank_cutoff: float = 1e-12) -> WignerGrid:
    """Wigner transform of a reduced density matrix on the given grid."""
    vals, vecs = rho.eigensystem()
    keep = vals > rank_cutoff
    return wigner_from_components(vals[keep], vecs[:, keep], params, q_axis, p_axis)


def purity(rho: ReducedDensity) -> float:
    """gamma = tr rho^2, in [1/(2j+1), 1] for a 2j+1 Schmidt-rank state."""
    return float(np.linalg.norm(rho.matrix, "fro") ** 2)


def negativity(w: WignerGrid, norm_tol: float = 1e-3,
               tail_tol: float = 1e-3) -> float:
    """nu = int (|W| - W) dq dp, the negative Wigner volume (trapezoidal).

    Requires an approximately normalized grid that captures the state's
    support; raises ExtentError when too much |W| mass sits on the boundary.
    """
    if w.norm_residual > norm_tol:
        raise ExtentError(
            f"Wigner norm residual {w.norm_residual:.2e} exceeds {norm_tol:.0e}; "
            "enlarge the grid extent or refine the grid")
    tail = w.boundary_tail()
    if tail > tail_tol:
        raise ExtentError(
            f"boundary |W| mass {tail:.2e} exceeds {tail_tol:.0e}; enlarge extent")
    nu = w.integrate(np.abs(w.values) - w.values)
    return max(nu, 0.0) if nu > -1e-4 else nu


def marginals(w: WignerGrid) -> tuple[np.ndarray, np.ndarray]:
    """(|psi(q)|^2, |psi(p)|^2) profiles by integrating out p resp. q."""
    prob_q = np.trapezoid(w.values, w.p_axis, axis=1)
    prob_p = np.trapezoid(w.values, w.q_axis, axis=0)
    for prof, axis, name in ((prob_q, w.q_axis, "q"), (prob_p, w.p_axis, "p")):
        if prof.min() < -1e-6:
            warnings.warn(f"{name} marginal dips to {prof.min():.2e}",
                          RuntimeWarning, stacklevel=2)
        norm = np.trapezoid(prof, axis)
        if abs(norm - 1.0) > 1e-4:
            warnings.warn(f"{name} marginal norm {norm:.6f}", RuntimeWarning,
                          stacklevel=2)
    return prob_q, prob_p
