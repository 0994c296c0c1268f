"""Truncated product Hilbert space Fock x spin and the model operators.

The model couples one bosonic mode (energy quantum ``omega``) to a spin of
length ``j`` (detuning ``R``, coupling ``lam``, mixing parameter ``delta``).
All Hamiltonians produced here are dimensionless: energies are measured in
units ``eps = 2*j*R*omega``.  Simulation time runs in units ``1/omega``, the
clock in which the classical orbits of the scaled Hamiltonian have periods of
order 2*pi; the propagator therefore carries the factor 2jR on the scaled
energies.  The zero of energy is fixed so that the decoupled (lam = 0) ground
state sits at e = 0.

Basis ordering is lexicographic with the Fock index outer and the spin
projection inner: index = n*(2j+1) + (m_z + j), n = 0..n_max, m_z = -j..+j.
This ordering is serialized into every output file header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SizingError

MAX_DIMENSION = 200_000

__all__ = [
    "ModelParams",
    "BasisDescriptor",
    "OperatorMatrix",
    "build_basis",
    "build_hamiltonian",
    "build_parity",
    "build_quadratures",
    "build_spin_ops",
    "effective_field",
    "adaptive_n_max",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of one Hamiltonian instance.

    j      : half-integer spin length (j = N/2, N >= 1)
    R      : detuning / size parameter (> 0)
    lam    : dimensionless spin-oscillator coupling
    delta  : interaction-mixing parameter in [-1, 1]
    omega  : oscillator quantum; only sets the absolute scale
    n_max  : Fock truncation (highest retained occupation, >= 0)
    """

    j: float
    R: float
    lam: float
    delta: float
    omega: float = 1.0
    n_max: int = 0

    def __post_init__(self):
        two_j = 2 * self.j
        if abs(two_j - round(two_j)) > 1e-12 or round(two_j) < 1:
            raise ValueError(f"2j must be a positive integer, got j={self.j}")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if not -1.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [-1, 1]")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def energy_unit(self) -> float:
        """eps = 2jR*omega, the unit of energy (and inverse unit of time)."""
        return 2.0 * self.j * self.R * self.omega

    @property
    def time_unit(self) -> float:
        """1/omega: the clock shared by classical orbits and quantum evolution."""
        return 1.0 / self.omega

    @property
    def phase_scale(self) -> float:
        """2jR: multiplies scaled energies in the propagator e^{-i 2jR e t}."""
        return 2.0 * self.j * self.R

    def with_lam(self, lam: float) -> "ModelParams":
        return ModelParams(self.j, self.R, lam, self.delta, self.omega, self.n_max)

    def with_n_max(self, n_max: int) -> "ModelParams":
        return ModelParams(self.j, self.R, self.lam, self.delta, self.omega, n_max)


@dataclass(frozen=True)
class BasisDescriptor:
    """Index map of the truncated product basis (n outer, m_z inner)."""

    j: float
    n_max: int
    dimension: int = field(init=False)

    def __post_init__(self):
        dim = (self.n_max + 1) * self.n_spin
        if dim > MAX_DIMENSION:
            raise SizingError(
                f"basis dimension {dim} exceeds the supported maximum {MAX_DIMENSION}"
            )
        object.__setattr__(self, "dimension", dim)

    @property
    def n_spin(self) -> int:
        return int(round(2 * self.j)) + 1

    def index(self, n: int, m_z: float) -> int:
        """Flat index of |n, m_z>."""
        k = int(round(m_z + self.j))
        if not (0 <= n <= self.n_max and 0 <= k < self.n_spin):
            raise IndexError(f"(n={n}, m_z={m_z}) outside the basis")
        return n * self.n_spin + k

    def quantum_numbers(self, i: int) -> tuple[int, float]:
        """Inverse of :meth:`index`: (n, m_z) of flat index i."""
        if not 0 <= i < self.dimension:
            raise IndexError(i)
        n, k = divmod(i, self.n_spin)
        return n, k - self.j

    def fock_values(self) -> np.ndarray:
        """Fock occupation n per flat index."""
        return np.repeat(np.arange(self.n_max + 1), self.n_spin)

    def mz_values(self) -> np.ndarray:
        """Spin projection m_z per flat index."""
        return np.tile(np.arange(self.n_spin) - self.j, self.n_max + 1)

    def ordering_note(self) -> str:
        return ("index = n*(2j+1) + (m_z + j); n outer 0..n_max, "
                "m_z inner -j..+j")


@dataclass
class OperatorMatrix:
    """Dense operator over the product basis, with Hermiticity bookkeeping."""

    basis: BasisDescriptor
    entries: np.ndarray
    hermitian: bool = True
    params: "ModelParams | None" = None

    def __post_init__(self):
        self.entries = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if self.entries.shape != (self.basis.dimension, self.basis.dimension):
            raise ValueError("entry matrix does not match the basis dimension")
        if self.hermitian:
            scale = max(np.abs(self.entries).max(), 1.0)
            dev = np.abs(self.entries - self.entries.conj().T).max() / scale
            if dev > 1e-12:
                raise ValueError(f"operator flagged Hermitian deviates by {dev:.2e}")

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries.conj().T, self.hermitian)


def build_basis(params: ModelParams) -> BasisDescriptor:
    return BasisDescriptor(params.j, params.n_max)


def _boson_ladder(basis: BasisDescriptor) -> np.ndarray:
    """Annihilation operator b (tensored with the spin identity)."""
    nf = basis.n_max + 1
    b1 = np.diag(np.sqrt(np.arange(1, nf)), k=1)
    return np.kron(b1, np.eye(basis.n_spin))


def _spin_matrices(j: float) -> dict[str, np.ndarray]:
    """Angular-momentum matrices in the (2j+1)-dimensional m_z basis."""
    m = np.arange(-j, j + 1)
    jz = np.diag(m)
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1))
    jp = np.zeros((len(m), len(m)))
    for k in range(len(m) - 1):
        jp[k + 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jm = jp.T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    return {"Jz": jz, "Jp": jp, "Jm": jm, "Jx": jx, "Jy": jy}


def build_spin_ops(basis: BasisDescriptor) -> dict[str, OperatorMatrix]:
    """Spin operators tensored with the Fock identity: Jx, Jy, Jz, Jp, Jm."""
    small = _spin_matrices(basis.j)
    eye_f = np.eye(basis.n_max + 1)
    out = {}
    for name, mat in small.items():
        herm = name in ("Jx", "Jy", "Jz")
        out[name] = OperatorMatrix(basis, np.kron(eye_f, mat), hermitian=herm)
    return out


def build_hamiltonian(params: ModelParams) -> OperatorMatrix:
    """Scaled Hamiltonian h = H/(2jR*omega) over the product basis.

    Diagonal part n/(2jR) + (m_z + j)/(2j); the interaction couples
    (n, m_z) <-> (n+1, m_z -+ 1) with weights proportional to (1 +- delta).
    """
    basis = build_basis(params)
    j, R, lam, delta = params.j, params.R, params.lam, params.delta
    n_vals = basis.fock_values()
    m_vals = basis.mz_values()
    h = np.diag(n_vals / (2 * j * R) + (m_vals + j) / (2 * j)).astype(np.complex128)

    b = _boson_ladder(basis)
    spin = build_spin_ops(basis)
    jp, jm = spin["Jp"].entries, spin["Jm"].entries
    g = lam / (4 * j) * math.sqrt(1.0 / (2 * j * R))
    bdag = b.conj().T
    h += g * ((1 + delta) * (bdag @ jm + b @ jp) + (1 - delta) * (bdag @ jp + b @ jm))
    return OperatorMatrix(basis, h, hermitian=True, params=params)


def build_parity(basis: BasisDescriptor) -> OperatorMatrix:
    """Conserved parity, diagonal with entries (-1)^(n + m_z + j)."""
    expo = basis.fock_values() + basis.mz_values() + basis.j
    vals = np.where(np.round(expo).astype(int) % 2 == 0, 1.0, -1.0)
    return OperatorMatrix(basis, np.diag(vals), hermitian=True)


def build_quadratures(params: ModelParams) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Rescaled quadratures q = (b^dag + b)/sqrt(4jR), p = i(b^dag - b)/sqrt(4jR)."""
    basis = build_basis(params)
    b = _boson_ladder(basis)
    s = 1.0 / math.sqrt(4 * params.j * params.R)
    q = OperatorMatrix(basis, s * (b.conj().T + b), hermitian=True)
    p = OperatorMatrix(basis, 1j * s * (b.conj().T - b), hermitian=True)
    return q, p


def effective_field(q: float, p: float, params: ModelParams) -> tuple[np.ndarray, float]:
    """Rescaled effective field b = (lam*q/sqrt2, -lam*delta*p/sqrt2, 1/2) and |b|.

    The unscaled field seen by the spin is B = 2R*b.
    """
    lam, delta = params.lam, params.delta
    vec = np.array([lam * q / math.sqrt(2), -lam * delta * p / math.sqrt(2), 0.5])
    return vec, float(np.linalg.norm(vec))


def _two_lowest(params: ModelParams) -> np.ndarray:
    """Two lowest eigenvalues of h at the given truncation (real solver)."""
    from scipy.linalg import eigh

    h = build_hamiltonian(params).entries
    assert np.abs(h.imag).max() == 0.0
    return eigh(h.real, subset_by_index=[0, 1], eigvals_only=True)


def adaptive_n_max(params: ModelParams, tol: float = 1e-10,
                   start_factor: float = 2.0, max_doublings: int = 6) -> int:
    """Fock truncation converged for the ground doublet of h(params.lam).

    Starts at ceil(start_factor * jR * (q_min^2 + 1)), with <b^dag b> ~ jR q^2
    in the superradiant minimum, and doubles until the two lowest energies
    move by less than ``tol``.
    """
    from .semiclassics import minimum

    q_min, _, _ = minimum(abs(params.lam))
    n = max(16, math.ceil(start_factor * params.j * params.R * (q_min ** 2 + 1.0)))
    e_prev = _two_lowest(params.with_n_max(n))
    for _ in range(max_doublings):
        e_next = _two_lowest(params.with_n_max(2 * n))
        if np.abs(e_next - e_prev).max() < tol:
            return n
        n *= 2
        e_prev = e_next
    from .errors import ConvergenceError

    raise ConvergenceError(
        f"ground doublet not converged up to n_max={n} (tol={tol})")
