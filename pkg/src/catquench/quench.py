"""State preparation, exact post-quench evolution and observables.

Evolution is by spectral decomposition of the final Hamiltonian: with
energies in units eps = 2jR*omega and time in units 1/omega, the phase of
eigenstate k at time t is exp(-i 2jR e_k t).  This is the clock in which the
classical orbits of the scaled Hamiltonian run with periods of order 2*pi,
so quantum wavepacket motion and semiclassical orbit periods can be compared
on the same axis.  There is no integrator error anywhere in the quantum
dynamics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatchError
from .hilbert import (BasisDescriptor, ModelParams, OperatorMatrix,
                      build_hamiltonian, build_quadratures, effective_field)
from .spectrum import EigenDecomposition, diagonalize, ground_doublet

__all__ = [
    "QuenchSpec",
    "QuantumState",
    "ReducedDensity",
    "prepare_initial_state",
    "evolve",
    "expectation",
    "reduced_density",
    "survival_probability",
    "local_survival",
    "rabi_frequency",
    "spin_rotation",
    "spin_coherent_state",
    "branch_projector",
]


@dataclass(frozen=True)
class QuenchSpec:
    """One quench protocol: prepare at lambda_in, evolve under lambda_fi."""

    lambda_in: float
    lambda_fi: float
    j: float
    R: float
    delta: float
    omega: float = 1.0
    prep_method: str = "doublet_superposition"
    time_grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 80.0, 161))

    def __post_init__(self):
        if self.prep_method not in ("doublet_superposition", "coherent_product"):
            raise ValueError(f"unknown prep_method {self.prep_method!r}")
        t = np.asarray(self.time_grid, dtype=float)
        if t.ndim != 1 or len(t) == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("time_grid must be strictly increasing and start at 0")
        object.__setattr__(self, "time_grid", t)

    def model_params(self, lam: float, n_max: int) -> ModelParams:
        return ModelParams(self.j, self.R, lam, self.delta, self.omega, n_max)


@dataclass
class QuantumState:
    """Normalized amplitude vector over the product basis."""

    basis: BasisDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise DimensionMismatchError("amplitude vector does not match basis")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm} deviates from 1")


@dataclass
class ReducedDensity:
    """Oscillator density matrix after tracing out the spin."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dev = np.abs(self.matrix - self.matrix.conj().T).max()
        if dev > 1e-12:
            raise ValueError(f"reduced density not Hermitian ({dev:.2e})")
        tr = self.matrix.trace().real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"reduced density trace {tr} deviates from 1")

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = np.linalg.eigh(self.matrix)
        if vals.min() < -1e-10:
            raise ValueError(f"reduced density has eigenvalue {vals.min():.2e}")
        return vals, vecs


def spin_rotation(j: float, theta: float, phi: float) -> np.ndarray:
    """Rotation exp(-i phi Jz) exp(-i theta Jy) in the (2j+1) spin space."""
    from .hilbert import _spin_matrices

    mats = _spin_matrices(j)
    return expm(-1j * phi * mats["Jz"]) @ expm(-1j * theta * mats["Jy"])


def spin_coherent_state(j: float, m: float, n_vec: np.ndarray) -> np.ndarray:
    """|m; n> : the Jz eigenstate |m> rotated so the z-axis points along n."""
    nx, ny, nz = n_vec / np.linalg.norm(n_vec)
    theta = math.acos(np.clip(nz, -1.0, 1.0))
    phi = math.atan2(ny, nx)
    e_m = np.zeros(int(round(2 * j)) + 1, dtype=np.complex128)
    e_m[int(round(m + j))] = 1.0
    return spin_rotation(j, theta, phi) @ e_m


def _coherent_fock(beta: complex, n_max: int) -> np.ndarray:
    """Truncated coherent-state amplitudes, renormalized on the cut space."""
    n = np.arange(n_max + 1)
    log_mod = -0.5 * abs(beta) ** 2 + n * np.log(abs(beta) + 1e-300) \
        - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    phase = np.exp(1j * n * np.angle(beta)) if beta != 0 else np.ones(n_max + 1)
    amps = np.exp(log_mod) * phase
    lost = 1.0 - np.linalg.norm(amps) ** 2
    if lost > 1e-8:
        warnings.warn(f"coherent state loses {lost:.2e} weight to truncation",
                      RuntimeWarning, stacklevel=2)
    return amps / np.linalg.norm(amps)


def prepare_initial_state(spec: QuenchSpec, decomp_in: EigenDecomposition,
                          params_in: ModelParams) -> QuantumState:
    """Pre-quench state in the leftmost (q < 0) well.

    doublet_superposition: (v0 +- v1)/sqrt2 with the sign minimizing <q>.
    coherent_product: coherent oscillator at (q, p) = (-q_min, 0) tensored
    with the spin state of minimal projection along the local effective
    field (the two agree up to O(1/R) corrections).
    """
    basis = decomp_in.basis
    if spec.prep_method == "doublet_superposition":
        if abs(spec.lambda_in) <= 1.0:
            warnings.warn("|lambda_in| <= 1: ground doublet is not quasi-degenerate",
                          RuntimeWarning, stacklevel=2)
        v0, v1, _, _, _ = ground_doublet(decomp_in)
        q_op, _ = build_quadratures(params_in)
        best = None
        for sign in (+1.0, -1.0):
            psi = (v0 + sign * v1) / math.sqrt(2.0)
            psi /= np.linalg.norm(psi)
            q_mean = float(np.real(psi.conj() @ q_op.entries @ psi))
            if best is None or q_mean < best[0]:
                best = (q_mean, psi)
        return QuantumState(basis, best[1])

    from .semiclassics import minimum

    q_min, _, _ = minimum(abs(spec.lambda_in))
    q_bar = -q_min
    beta = math.sqrt(spec.j * spec.R) * q_bar
    osc = _coherent_fock(beta, basis.n_max)
    b_vec, _ = effective_field(q_bar, 0.0, params_in)
    spin = spin_coherent_state(spec.j, -spec.j, b_vec)
    psi = np.kron(osc, spin)
    return QuantumState(basis, psi / np.linalg.norm(psi))


def overlaps(psi: QuantumState, decomp: EigenDecomposition) -> np.ndarray:
    """Expansion coefficients c_k = <e_k|psi>."""
    return decomp.states.conj().T @ psi.amplitudes


def evolve(psi0: QuantumState, decomp_final: EigenDecomposition,
           t: float | np.ndarray):
    """psi(t) = sum_k c_k exp(-i 2jR e_k t) |e_k>; t in units 1/omega.

    Scalar t returns a QuantumState; an array returns the dim x n_t matrix
    of evolved amplitude columns.
    """
    c = overlaps(psi0, decomp_final)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(-1j * np.outer(decomp_final.time_scale
                                   * decomp_final.energies, t_arr))
    block = decomp_final.states @ (c[:, None] * phases)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        v = block[:, 0]
        return QuantumState(psi0.basis, v / np.linalg.norm(v))
    return block


def expectation(psi: np.ndarray | QuantumState, a: OperatorMatrix):
    """<psi|A|psi>; returned real for Hermitian A (imag residue checked)."""
    v = psi.amplitudes if isinstance(psi, QuantumState) else psi
    if v.shape != (a.dimension,):
        raise DimensionMismatchError("state/operator dimension mismatch")
    val = complex(v.conj() @ (a.entries @ v))
    if a.hermitian:
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise ValueError(f"Hermitian expectation has imag part {val.imag:.2e}")
        return val.real
    return val


def reduced_density(psi: QuantumState) -> ReducedDensity:
    """Partial trace over the spin: rho[n, n'] = sum_m psi(n,m) psi*(n',m)."""
    n_spin = psi.basis.n_spin
    block = psi.amplitudes.reshape(psi.basis.n_max + 1, n_spin)
    rho = block @ block.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensity(rho / rho.trace().real)


def survival_probability(psi0: QuantumState, decomp_final: EigenDecomposition,
                         t: float | np.ndarray):
    """P(t) = |sum_k |c_k|^2 exp(-i 2jR e_k t)|^2; t in units 1/omega."""
    w = np.abs(overlaps(psi0, decomp_final)) ** 2
    t_arr = np.asarray(t, dtype=float)
    amp = np.exp(-1j * np.outer(np.atleast_1d(t_arr), decomp_final.time_scale
                                * decomp_final.energies)) @ w
    out = np.abs(amp) ** 2
    return float(out[0]) if t_arr.ndim == 0 else out


def local_survival(psi_tau: QuantumState, decomp_final: EigenDecomposition,
                   t: float | np.ndarray):
    """Exact P_tau(t) = |<psi(tau)|psi(tau+t)>|^2.

    By unitarity this equals the autocorrelation of the evolution at lag t;
    near factorization instants it oscillates at twice the local Rabi
    frequency (the j = 1/2 probability beats at the splitting 2|b| of the
    two effective branch energies, i.e. at angular frequency 2jR * 2|b| on
    the 1/omega time axis).
    """
    return survival_probability(psi_tau, decomp_final, t)


def rabi_frequency(q: float, p: float, lambda_fi: float, delta: float,
                   approx: bool = False) -> float:
    """Local Rabi frequency omega_tau = |b(q, p, lambda_fi)| in units eps.

    ``approx`` selects the small-coupling expansion
    (1 + lambda_fi^2 (q^2 + delta^2 p^2))/2 instead of the exact norm.
    Multiply by 2jR to convert to an angular frequency on the 1/omega
    time axis used by ``evolve``.
    """
    if approx:
        return 0.5 * (1.0 + lambda_fi ** 2 * (q ** 2 + delta ** 2 * p ** 2))
    return 0.5 * math.sqrt(2.0 * lambda_fi ** 2 * (q ** 2 + delta ** 2 * p ** 2) + 1.0)


def branch_projector(j: float, m: float, q_bar: float, p_bar: float,
                     params_fi: ModelParams) -> np.ndarray:
    """Spin projector |m; n(q_bar, p_bar)><m; ...| for branch tracking.

    The quantization axis follows the classical effective field at the
    branch's phase-space point; used to split the evolved state into its
    2j+1 wavepacket components.
    """
    b_vec, _ = effective_field(q_bar, p_bar, params_fi)
    ket = spin_coherent_state(j, m, b_vec)
    return np.outer(ket, ket.conj())
