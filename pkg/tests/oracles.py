"""Independent reference implementations used only by the tests.

These deliberately avoid the code paths of the package: oscillator
eigenfunctions come from numpy's Hermite polynomial evaluator instead of the
package's normalized recurrence, the Wigner transform is a direct Simpson
integral, and spin-rotation amplitudes come from a matrix exponential.
"""

import math

import numpy as np
from numpy.polynomial import hermite as H
from scipy.integrate import simpson
from scipy.linalg import expm


def hermite_function(n: int, x: np.ndarray) -> np.ndarray:
    """Normalized oscillator eigenfunction phi_n(x) via numpy's hermval.

    Safe for n <~ 30 and |x| <~ 8 in float64 (the unnormalized polynomial
    stays below overflow there).
    """
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    norm = 1.0 / math.sqrt(math.sqrt(math.pi) * (2.0 ** n) * math.factorial(n))
    return norm * H.hermval(x, coeffs) * np.exp(-0.5 * x ** 2)


def wigner_point_standard(rho_std: np.ndarray, x: float, p: float,
                          y_max: float = 12.0, n_y: int = 4001) -> float:
    """W(x, p) of a Fock-basis density matrix, hbar = 1 convention.

    Direct Simpson quadrature of (1/pi) int <x+y|rho|x-y> e^{-2ipy} dy.
    """
    y = np.linspace(-y_max, y_max, n_y)
    dim = rho_std.shape[0]
    phi_plus = np.array([hermite_function(n, x + y) for n in range(dim)])
    phi_minus = np.array([hermite_function(n, x - y) for n in range(dim)])
    integrand = np.einsum("mn,my,ny->y", rho_std, phi_plus, phi_minus.conj())
    integrand = integrand * np.exp(-2j * p * y)
    return float(np.real(simpson(integrand, x=y))) / math.pi


def wigner_point_rescaled(rho_std: np.ndarray, q: float, p: float,
                          two_jr: float) -> float:
    """Model-unit Wigner value W(q, p) = 2jR * W_std(sqrt(2jR) q, sqrt(2jR) p)."""
    s = math.sqrt(two_jr)
    return two_jr * wigner_point_standard(rho_std, s * q, s * p)


def rotation_amplitudes(j: float, theta: float) -> np.ndarray:
    """Column m' = -j of exp(-i theta Jy) in the m = -j..+j basis.

    Independent route to the wavepacket amplitudes d^j_{m,-j}(theta).
    """
    m = np.arange(-j, j + 1)
    dim = len(m)
    jp = np.zeros((dim, dim))
    for k in range(dim - 1):
        jp[k + 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jy = -0.5j * (jp - jp.T)
    d = expm(-1j * theta * jy)
    col = d[:, 0]
    assert np.abs(col.imag).max() < 1e-12
    return col.real


def harmonic_survival(weights: dict, energies: dict, time_scale: float,
                      t: np.ndarray) -> np.ndarray:
    """Two-level (or few-level) survival from branch weights and centroids."""
    amp = np.zeros(len(t), dtype=complex)
    for m, w in weights.items():
        amp += w * np.exp(-1j * time_scale * energies[m] * t)
    return np.abs(amp) ** 2
