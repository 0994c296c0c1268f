"""Classical-limit companion theory of the quench protocol.

Closed forms for the effective classical Hamiltonians in the spin-projection
subspaces mu = m/j, their minima and saddle, the quench mixing angle and
wavepacket amplitudes (Wigner d-functions), the special quench couplings,
and classical orbits with two independent period computations (adaptive ODE
integration and turning-point quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import InvertedWellError, NumericalError

__all__ = [
    "ClassicalParams",
    "ClassicalOrbit",
    "h_classical",
    "minimum",
    "after_quench_energy",
    "mixing_angle",
    "amplitudes",
    "balanced_quench",
    "critical_quench",
    "saddle_window",
    "integrate_orbit",
    "orbit_period_quadrature",
    "weak_coupling_frequency",
    "branch_energies",
    "revival_time_estimate",
]


@dataclass(frozen=True)
class ClassicalParams:
    """Coupling, mixing parameter and spin-projection label mu = m/j."""

    lam: float
    delta: float
    mu: float

    def __post_init__(self):
        if not -1.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [-1, 1]")


@dataclass
class ClassicalOrbit:
    """Time-sampled (q, p) trajectory in one mu subspace."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy: float
    mu: float
    period: float          # nan when not detected
    divergent: bool = False
    stationary: bool = False


def _field_norm(q, p, lam, delta):
    return np.sqrt(0.5 * lam ** 2 * (q ** 2 + delta ** 2 * p ** 2) + 0.25)


def h_classical(p: float, q: float, cp: ClassicalParams) -> float:
    """Classical Hamiltonian (p**2+q**2)/2 + 1/2 + mu*|b(q,p)| in subspace mu."""
    return 0.5 * (p ** 2 + q ** 2) + 0.5 + cp.mu * _field_norm(q, p, cp.lam, cp.delta)


def minimum(lam: float) -> tuple[float, float, float]:
    """(q_min, p_min, e_min) of the global (mu = -1) minimum.

    Deformed for |lam| > 1; otherwise the origin with e = 0.  Returns the
    positive q_min magnitude; protocol convention places the initial packet
    at the q < 0 mirror point.
    """
    if abs(lam) <= 1.0:
        return 0.0, 0.0, 0.0
    q_min = math.sqrt(0.5 * (lam ** 2 - lam ** -2))
    e_min = -0.25 * (lam ** 2 + lam ** -2) + 0.5
    return q_min, 0.0, e_min


def after_quench_energy(lambda_in: float, lambda_fi: float) -> float:
    """Mean energy of the pre-quench state under the final Hamiltonian.

    First-order (Hellmann-Feynman) expression around the frozen initial
    minimum; exact for this model since h is linear in |b| ~ lam-terms only
    through lam^2 q^2 at p = 0.
    """
    li, lf = lambda_in, lambda_fi
    return 0.25 * (li ** 2 - 3.0 / li ** 2) - 0.5 * lf * (li - li ** -3) + 0.5


def mixing_angle(lambda_in: float, lambda_fi: float) -> float:
    """cos(theta) between the pre- and after-quench effective fields.

    Evaluated at the frozen initial point (q_min, 0); |cos theta| <= 1 holds
    analytically and is asserted numerically.
    """
    li, lf = lambda_in, lambda_fi
    a = li ** 2 - li ** -2
    cos_theta = (1.0 + lf * li * a) / (li ** 2 * math.sqrt(1.0 + lf ** 2 * a))
    assert abs(cos_theta) <= 1.0 + 1e-12
    return float(np.clip(cos_theta, -1.0, 1.0))


def amplitudes(j: float, cos_theta: float) -> np.ndarray:
    """Wavepacket amplitudes alpha^(m) = d^j_{m,-j}(theta), m = -j..+j.

    The spin state with minimal projection along the old axis decomposed in
    the axis rotated by theta:
    d^j_{m,-j} = sqrt(C(2j, j+m)) cos^(j-m)(theta/2) sin^(j+m)(theta/2),
    with theta = arccos(cos_theta) on [0, pi].  The m = -j component carries
    weight cos^(4j)(theta/2) = ((1+cos theta)/2)^(2j); this sign convention
    is the one reproduced by the quantum strength function.
    """
    if abs(cos_theta) > 1.0:
        raise ValueError("cos_theta outside [-1, 1]")
    theta = math.acos(cos_theta)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    two_j = int(round(2 * j))
    m = np.arange(-j, j + 1)
    out = np.empty(two_j + 1)
    for k, mk in enumerate(m):
        comb = math.comb(two_j, int(round(j + mk)))
        out[k] = math.sqrt(comb) * c ** (j - mk) * s ** (j + mk)
    return out


def balanced_quench(lambda_in: float) -> float:
    """Final coupling giving equal weights to the mu = +-1 subspaces."""
    denom = 1.0 - lambda_in ** 4
    if denom == 0.0:
        raise ZeroDivisionError("lambda_in^4 = 1 is a pole of the balanced quench")
    return lambda_in / denom


def critical_quench(lambda_in: float) -> tuple[float, float]:
    """Couplings +-lambda_c at which the mu = -1 orbit hits the saddle.

    At these couplings the orbit launched from the pre-quench minimum has
    exactly the saddle energy h^(-1)(0, 0) = 0 and its period diverges.
    """
    lc = math.sqrt(0.25 * (lambda_in ** 2 - lambda_in ** -2) + 1.0)
    return lc, -lc


def saddle_window(lam: float, delta: float) -> bool:
    """Whether the mu = -1 Hamiltonian has the index-1 saddle at the origin.

    Requires 1 < |lam| and, for delta != 0, |lam| < 1/|delta| (otherwise the
    momentum direction inverts as well).
    """
    if abs(lam) <= 1.0:
        return False
    if delta == 0.0:
        return True
    return abs(lam) < 1.0 / abs(delta)


def _rhs(t, y, lam, delta, mu):
    q, p = y
    norm = _field_norm(q, p, lam, delta)
    qdot = p * (1.0 + mu * lam ** 2 * delta ** 2 / (2.0 * norm))
    pdot = -q * (1.0 + mu * lam ** 2 / (2.0 * norm))
    return (qdot, pdot)


def integrate_orbit(cp: ClassicalParams, q0: float, p0: float, t_end: float,
                    n_samples: int = 1000, rtol: float = 1e-10,
                    atol: float = 1e-12) -> ClassicalOrbit:
    """Integrate Hamilton's equations and detect the orbit period.

    Period detection: successive p = 0 crossings in the same direction
    (Poincare section), located by the integrator's event root-finder.
    Orbits that do not return within ``t_end`` are flagged divergent;
    stationary points are flagged stationary with period 0.
    """
    energy = h_classical(p0, q0, cp)
    args = (cp.lam, cp.delta, cp.mu)
    grad = np.hypot(*_rhs(0.0, (q0, p0), *args))
    times = np.linspace(0.0, t_end, n_samples)
    if grad < 1e-12:
        return ClassicalOrbit(times, np.full(n_samples, q0), np.full(n_samples, p0),
                              energy, cp.mu, 0.0, stationary=True)

    def section(t, y, *a):
        return y[1]

    section.direction = 0.0
    sol = solve_ivp(_rhs, (0.0, t_end), (q0, p0), args=args, method="DOP853",
                    rtol=rtol, atol=atol, t_eval=times, events=section,
                    dense_output=True)
    if not sol.success:
        raise NumericalError(f"orbit integration failed: {sol.message}")

    period = math.nan
    divergent = True
    crossings = sol.t_events[0]
    crossings = crossings[crossings > 1e-9]
    # Crossings alternate direction on a simple closed orbit, so the second
    # one after t=0 completes the period when the start lies on the section.
    if p0 == 0.0:
        if len(crossings) >= 2:
            period, divergent = float(crossings[1]), False
    else:
        if len(crossings) >= 3:
            period, divergent = float(crossings[2] - crossings[0]), False

    drift = np.abs(h_classical(sol.y[1], sol.y[0],  # type: ignore[arg-type]
                               cp) - energy).max()
    scale = max(abs(energy), 1.0)
    if drift / scale > 1e-8:
        raise NumericalError(f"orbit energy drift {drift:.2e} exceeds tolerance")
    return ClassicalOrbit(sol.t, sol.y[0], sol.y[1], energy, cp.mu, period,
                          divergent=divergent)


def _momentum_on_shell(q: float, e: float, cp: ClassicalParams) -> float:
    """Positive p solving h^mu(p, q) = e, via the quadratic in u = p^2."""
    lam, delta, mu = cp.lam, cp.delta, cp.mu
    e1 = e - 0.5 * q ** 2 - 0.5
    a = 0.5 * lam ** 2 * q ** 2 + 0.25
    b = 0.5 * lam ** 2 * delta ** 2
    # mu*sqrt(a + b u) = e1 - u/2, squared:
    #   u^2 - 4 (e1 + mu^2 b) u + 4 (e1^2 - mu^2 a) = 0
    mu2 = mu * mu
    s_coef = 4.0 * (e1 + mu2 * b)
    p_coef = 4.0 * (e1 ** 2 - mu2 * a)
    disc = s_coef ** 2 - 4.0 * p_coef
    if disc < 0:
        raise NumericalError("no real momentum on the energy shell")
    for sign in (+1.0, -1.0):
        u = 0.5 * (s_coef + sign * math.sqrt(disc))
        if u < -1e-13:
            continue
        u = max(u, 0.0)
        # keep the root consistent with the un-squared equation
        if abs(mu * math.sqrt(a + b * u) - (e1 - 0.5 * u)) < 1e-9 * max(1.0, abs(e1)):
            return math.sqrt(u)
    raise NumericalError("momentum root selection failed")


def _turning_points(e: float, cp: ClassicalParams) -> tuple[float, float]:
    """Bracketed p = 0 turning points [q-, q+] of the orbit at energy e."""

    def f(q):
        return h_classical(0.0, q, cp) - e

    q_big = math.sqrt(max(2.0 * (abs(e) + abs(cp.mu) * (abs(cp.lam) + 1.0) + 1.0), 4.0))
    qs = np.linspace(0.0, q_big, 4001)
    vals = f(qs)
    sign_change = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if len(sign_change) == 0:
        raise NumericalError("no turning point found; energy below minimum?")
    i = sign_change[-1]
    q_plus = brentq(f, qs[i], qs[i + 1], xtol=1e-14)
    if vals[0] < 0:
        # q = 0 classically allowed: the orbit encircles the origin
        return -q_plus, q_plus
    if len(sign_change) < 2:
        raise NumericalError("inner turning point not bracketed")
    # double-well orbit confined to one side (use the q > 0 well; h is even)
    i = sign_change[0]
    q_minus = brentq(f, qs[i], qs[i + 1], xtol=1e-14)
    return q_minus, q_plus


def orbit_period_quadrature(cp: ClassicalParams, energy: float,
                            n_nodes: int = 400) -> float:
    """Orbit period via the turning-point contour integral T = 2 int dq/qdot.

    The substitution q = q_c + A sin(s) absorbs the inverse square-root
    endpoint singularities; Gauss-Legendre in s.  Raises on energies at or
    above the saddle (divergent period) in the double-well regime.
    """
    if cp.mu < 0 and abs(cp.lam) > 1.0 and energy == h_classical(0.0, 0.0, cp):
        # the origin is the double-well saddle of negative-mu subspaces
        raise NumericalError("energy exactly at the saddle: period diverges")
    q_lo, q_hi = _turning_points(energy, cp)
    q_c, amp = 0.5 * (q_hi + q_lo), 0.5 * (q_hi - q_lo)
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    s = 0.5 * math.pi * nodes
    w = 0.5 * math.pi * weights
    total = 0.0
    for sk, wk in zip(s, w):
        q = q_c + amp * math.sin(sk)
        p = _momentum_on_shell(q, energy, cp)
        norm = _field_norm(q, p, cp.lam, cp.delta)
        qdot = p * (1.0 + cp.mu * cp.lam ** 2 * cp.delta ** 2 / (2.0 * norm))
        if qdot <= 0:
            raise NumericalError("non-positive dq/dt on the upper shell branch")
        # dq = amp cos(s) ds and p ~ C cos(s) near the endpoints
        total += wk * amp * math.cos(sk) / qdot
    return 2.0 * total


def weak_coupling_frequency(cp: ClassicalParams) -> tuple[float, float]:
    """(exact, expanded) small-coupling oscillator frequency in subspace mu.

    Exact product form sqrt((1 + mu lam^2 delta^2)(1 + mu lam^2)) of the
    quadratic expansion around the origin, and its leading expansion
    1 + mu lam^2 (1 + delta^2)/2.
    """
    a = 1.0 + cp.mu * cp.lam ** 2 * cp.delta ** 2
    b = 1.0 + cp.mu * cp.lam ** 2
    if a <= 0 or b <= 0:
        raise InvertedWellError(
            f"inverted well: stiffnesses ({a:.3g}, {b:.3g}) not both positive")
    exact = math.sqrt(a * b)
    expanded = 1.0 + 0.5 * cp.mu * cp.lam ** 2 * (1.0 + cp.delta ** 2)
    return exact, expanded


def branch_energies(lambda_in: float, lambda_fi: float, j: float,
                    delta: float = 0.0) -> dict[float, float]:
    """Map m -> h^(m/j)(p_min, q_min, lambda_fi) at the frozen initial point.

    These are the semiclassical centroids of the strength-function peaks.
    The values are independent of delta at p_min = 0; the parameter is kept
    for signature symmetry with the orbit routines.
    """
    q_min, p_min, _ = minimum(lambda_in)
    two_j = int(round(2 * j))
    out = {}
    for k in range(two_j + 1):
        m = -j + k
        cp = ClassicalParams(lambda_fi, delta, m / j)
        out[m] = h_classical(p_min, q_min, cp)
    return out


def revival_time_estimate(lambda_fi: float, delta: float) -> float:
    """Re-coincidence time of the extreme mu = +-1 wavepackets.

    Weak-coupling estimate 2 pi / (omega^(+1) - omega^(-1)) with the expanded
    frequencies, i.e. 2 pi / (lam^2 (1 + delta^2)).  Used to place analysis
    windows between revivals; j-independent.
    """
    gap = lambda_fi ** 2 * (1.0 + delta ** 2)
    if gap == 0.0:
        return math.inf
    return 2.0 * math.pi / gap
