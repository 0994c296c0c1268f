"""Diagonalization, parity doublets and after-quench strength functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NumericalError
from .hilbert import BasisDescriptor, OperatorMatrix, build_parity

__all__ = [
    "EigenDecomposition",
    "StrengthFunction",
    "diagonalize",
    "ground_doublet",
    "strength_function",
    "assign_peaks",
]


@dataclass
class EigenDecomposition:
    """Full spectrum of a Hermitian operator with per-state parity labels."""

    basis: BasisDescriptor
    energies: np.ndarray        # ascending, real, in units eps = 2jR*omega
    states: np.ndarray          # orthonormal eigenvector columns
    parities: np.ndarray        # +-1 per state
    time_scale: float = 1.0     # 2jR: phase of state k at time t is e^{-i 2jR e_k t}

    @property
    def dimension(self) -> int:
        return len(self.energies)


@dataclass
class StrengthFunction:
    """Distribution |c_k|^2 of a state over final eigenstates, sorted by energy."""

    energies: np.ndarray
    weights: np.ndarray
    assigned_m: np.ndarray | None = None
    peak_weights: dict[float, float] = field(default_factory=dict)

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def mean_energy(self) -> float:
        return float(self.weights @ self.energies)


def _eigh_any(mat):
    try:
        if np.abs(mat.imag).max() == 0.0:
            energies, states = np.linalg.eigh(mat.real)
            return energies, states.astype(np.complex128)
        return np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        scale = np.abs(mat).max()
        raise NumericalError(f"eigensolver failed (max |entry| {scale:.3e}): {exc}")


def diagonalize(h: OperatorMatrix) -> EigenDecomposition:
    """Full spectrum of h, ascending, with parity labels per eigenvector.

    The model Hamiltonian has exactly zero matrix elements between the two
    parity sectors, so each sector is diagonalized separately and the
    spectra are merged; this keeps every eigenvector parity-pure even inside
    the machine-degenerate tunneling doublets of the symmetry-broken phase,
    where a dense solver would return arbitrary doublet mixtures.  Operators
    that do couple the sectors fall back to one dense solve with an explicit
    parity-sharpness check.
    """
    mat = h.entries
    parity_diag = np.real(np.diag(build_parity(h.basis).entries))
    idx_even = np.nonzero(parity_diag > 0)[0]
    idx_odd = np.nonzero(parity_diag < 0)[0]
    cross = np.abs(mat[np.ix_(idx_even, idx_odd)]).max() if len(idx_even) and len(idx_odd) else 0.0
    scale = max(np.abs(mat).max(), 1.0)

    if cross <= 1e-13 * scale:
        dim = mat.shape[0]
        energies = np.empty(dim)
        states = np.zeros((dim, dim), dtype=np.complex128)
        parities = np.empty(dim)
        col = 0
        for sign, idx in ((1.0, idx_even), (-1.0, idx_odd)):
            if len(idx) == 0:
                continue
            e_s, v_s = _eigh_any(mat[np.ix_(idx, idx)])
            sl = slice(col, col + len(idx))
            energies[sl] = e_s
            states[np.ix_(idx, range(col, col + len(idx)))] = v_s
            parities[sl] = sign
            col += len(idx)
        order = np.argsort(energies, kind="stable")
        return EigenDecomposition(
            h.basis, energies[order], states[:, order], parities[order],
            h.params.phase_scale if h.params is not None else 1.0)

    energies, states = _eigh_any(mat)
    expect = np.real(np.einsum("ik,i,ik->k", states.conj(), parity_diag, states))
    if np.abs(np.abs(expect) - 1.0).max() > 1e-6:
        worst = np.abs(np.abs(expect) - 1.0).max()
        raise NumericalError(
            f"parity labels not sharp for parity-coupling operator ({worst:.2e})")
    parities = np.where(expect > 0, 1.0, -1.0)
    time_scale = h.params.phase_scale if h.params is not None else 1.0
    return EigenDecomposition(h.basis, energies, states, parities, time_scale)


def ground_doublet(decomp: EigenDecomposition):
    """Two lowest eigenpairs with parity labels and their energy splitting.

    Returns (state_lo, state_hi, splitting, parity_lo, parity_hi).  In the
    superradiant phase the splitting is exponentially small and the parities
    are opposite.
    """
    v0, v1 = decomp.states[:, 0], decomp.states[:, 1]
    splitting = float(decomp.energies[1] - decomp.energies[0])
    return v0, v1, splitting, decomp.parities[0], decomp.parities[1]


def strength_function(psi0: np.ndarray, decomp_final: EigenDecomposition) -> StrengthFunction:
    """After-quench strength function |<e_k(lam_fi)|psi0>|^2, sorted by energy."""
    if psi0.shape != (decomp_final.dimension,):
        raise DimensionMismatchError(
            f"state dim {psi0.shape} vs eigenbasis dim {decomp_final.dimension}")
    c = decomp_final.states.conj().T @ psi0
    weights = np.abs(c) ** 2
    return StrengthFunction(decomp_final.energies.copy(), weights)


def assign_peaks(sf: StrengthFunction, centroids: dict[float, float]) -> StrengthFunction:
    """Assign each eigenstate to the branch m with the nearest predicted energy.

    ``centroids`` maps spin projection m to its semiclassical branch energy
    (the classical effective Hamiltonian at the frozen pre-quench point).
    Degenerate centroids trigger a warning and merged weights.
    """
    import warnings

    ms = np.array(sorted(centroids))
    es = np.array([centroids[m] for m in ms])
    if len(es) > 1 and np.min(np.diff(np.sort(es))) < 1e-12:
        warnings.warn("overlapping branch centroids: peak weights merged",
                      RuntimeWarning, stacklevel=2)
    idx = np.argmin(np.abs(sf.energies[:, None] - es[None, :]), axis=1)
    assigned = ms[idx]
    peak_weights = {float(m): float(sf.weights[assigned == m].sum()) for m in ms}
    return StrengthFunction(sf.energies, sf.weights, assigned, peak_weights)
