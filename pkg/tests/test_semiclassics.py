"""Classical companion theory: closed forms, orbits and special quenches.

Frozen reference numbers were derived independently (by hand and with an
independent matrix-exponential oracle for the rotation amplitudes) before
being compared against the implementation.
"""

import math

import numpy as np
import pytest

from catquench import semiclassics as sc
from catquench.errors import InvertedWellError, NumericalError
from oracles import rotation_amplitudes

HEADLINE = dict(lam_in=1.5, lam_fi=-0.283, delta=0.5)


def test_minimum_closed_form():
    # q_min = sqrt((lam^2 - lam^-2)/2), e_min = -(lam^2 + lam^-2)/4 + 1/2
    q_min, p_min, e_min = sc.minimum(1.5)
    assert abs(q_min - 0.950146187582615) < 1e-14
    assert p_min == 0.0
    assert abs(e_min - (-0.173611111111111)) < 1e-13
    # normal phase: minimum at the origin with e = 0
    assert sc.minimum(0.7) == (0.0, 0.0, 0.0)


def test_minimum_is_stationary_point():
    q_min, _, e_min = sc.minimum(1.5)
    cp = sc.ClassicalParams(1.5, 0.5, -1.0)
    assert abs(sc.h_classical(0.0, q_min, cp) - e_min) < 1e-14
    eps = 1e-6
    de = (sc.h_classical(0.0, q_min + eps, cp)
          - sc.h_classical(0.0, q_min - eps, cp)) / (2 * eps)
    assert abs(de) < 1e-9


def test_after_quench_energy():
    e_fi = sc.after_quench_energy(1.5, -0.283)
    assert abs(e_fi - 0.899490740740741) < 1e-13
    # lam_fi = lam_in reproduces the pre-quench minimum energy
    assert abs(sc.after_quench_energy(1.5, 1.5) - sc.minimum(1.5)[2]) < 1e-13


def test_mixing_angle():
    assert abs(sc.mixing_angle(1.5, -0.283) - 0.0970183784011902) < 1e-14
    # no quench: fields parallel
    assert abs(sc.mixing_angle(1.5, 1.5) - 1.0) < 1e-14
    with pytest.raises(ValueError):
        sc.amplitudes(0.5, 1.5)


def test_amplitudes_match_rotation_oracle():
    for j in (0.5, 1.0, 2.0, 3.5):
        for cos_theta in (-0.8, 0.097, 0.6, 1.0):
            theta = math.acos(cos_theta)
            ours = sc.amplitudes(j, cos_theta)
            oracle = np.abs(rotation_amplitudes(j, theta))
            assert np.abs(np.abs(ours) - oracle).max() < 1e-12
            assert abs(np.sum(ours ** 2) - 1.0) < 1e-12


def test_amplitudes_energy_sum_rule():
    # sum_m |alpha^m|^2 e_branch(m) equals the after-quench mean energy
    for j in (0.5, 2.0):
        w = sc.amplitudes(j, sc.mixing_angle(1.5, -0.283)) ** 2
        branches = sc.branch_energies(1.5, -0.283, j, 0.5)
        mean = sum(wk * branches[m] for wk, m in zip(w, sorted(branches)))
        assert abs(mean - sc.after_quench_energy(1.5, -0.283)) < 1e-12


def test_headline_branch_energies():
    branches = sc.branch_energies(*[HEADLINE[k] for k in
                                    ("lam_in", "lam_fi")], 0.5, 0.5)
    assert abs(branches[-0.5] - 0.416457786108146) < 1e-13
    assert abs(branches[0.5] - 1.486319991669632) < 1e-13


def test_balanced_quench():
    assert abs(sc.balanced_quench(1.5) - (-24.0 / 65.0)) < 1e-15
    with pytest.raises(ZeroDivisionError):
        sc.balanced_quench(1.0)
    # equal weights: cos theta = 0 at the balanced coupling
    assert abs(sc.mixing_angle(1.5, sc.balanced_quench(1.5))) < 1e-14


def test_critical_quench():
    lc, lc_neg = sc.critical_quench(1.5)
    assert abs(lc - math.sqrt(209.0) / 12.0) < 1e-14
    assert lc_neg == -lc
    # orbit launched from the minimum carries exactly the saddle energy
    q_min, _, _ = sc.minimum(1.5)
    cp = sc.ClassicalParams(lc, 0.5, -1.0)
    assert abs(sc.h_classical(0.0, q_min, cp) - sc.h_classical(0.0, 0.0, cp)) < 1e-14


def test_saddle_window():
    assert not sc.saddle_window(0.8, 0.5)
    assert sc.saddle_window(1.5, 0.5)
    assert not sc.saddle_window(2.5, 0.5)
    assert sc.saddle_window(1.5, 0.0)


def test_orbit_energy_conservation_and_period():
    q0 = -sc.minimum(1.5)[0]
    cp = sc.ClassicalParams(-math.sqrt(2) / 5.0, 0.5, -1.0)
    orbit = sc.integrate_orbit(cp, q0, 0.0, 50.0)
    assert not orbit.divergent and not orbit.stationary
    drift = np.abs(sc.h_classical(orbit.p, orbit.q, cp) - orbit.energy).max()
    assert drift < 1e-8
    assert abs(orbit.period - 6.599867786830) < 1e-9


def test_orbit_stationary_flag():
    # quenching lam -> -lam leaves the classical minimum in place
    q_min, _, _ = sc.minimum(1.5)
    cp = sc.ClassicalParams(-1.5, 0.5, -1.0)
    orbit = sc.integrate_orbit(cp, -q_min, 0.0, 20.0)
    assert orbit.stationary and orbit.period == 0.0


def test_ode_vs_quadrature_periods():
    q0 = -sc.minimum(1.5)[0]
    for lam_fi, delta, mu in ((-0.283, 0.5, -1.0), (-0.283, 0.5, 1.0),
                              (0.5, 0.0, -1.0), (-0.7, 0.3, 1.0)):
        cp = sc.ClassicalParams(lam_fi, delta, mu)
        orbit = sc.integrate_orbit(cp, q0, 0.0, 60.0)
        t_quad = sc.orbit_period_quadrature(cp, orbit.energy)
        assert abs(orbit.period - t_quad) / t_quad < 1e-8


def test_quadrature_double_well_confined():
    cp = sc.ClassicalParams(1.3, 0.5, -1.0)
    _, _, e_min = sc.minimum(1.3)
    energy = e_min + 0.02          # below the saddle at e = 0
    t_quad = sc.orbit_period_quadrature(cp, energy)
    q_lo, q_hi = sc._turning_points(energy, cp)
    assert 0.0 < q_lo < q_hi
    orbit = sc.integrate_orbit(cp, q_lo, 0.0, 60.0)
    assert abs(orbit.period - t_quad) / t_quad < 1e-8


def test_quadrature_rejects_saddle_energy():
    cp = sc.ClassicalParams(1.3, 0.5, -1.0)
    with pytest.raises(NumericalError):
        sc.orbit_period_quadrature(cp, sc.h_classical(0.0, 0.0, cp))


def test_weak_coupling_frequency():
    cp = sc.ClassicalParams(0.4, 0.5, 1.0)
    exact, expanded = sc.weak_coupling_frequency(cp)
    assert abs(exact - math.sqrt(1.04 * 1.16)) < 1e-15
    assert abs(expanded - 1.1) < 1e-15
    with pytest.raises(InvertedWellError):
        sc.weak_coupling_frequency(sc.ClassicalParams(1.5, 0.5, -1.0))


def test_revival_time_estimate():
    assert abs(sc.revival_time_estimate(-0.283, 0.5) - 62.762030313073) < 1e-9
    assert sc.revival_time_estimate(0.0, 0.5) == math.inf


def test_period_grows_toward_critical_coupling():
    # logarithmic divergence of the mu = -1 period at the saddle coupling
    lam_c = sc.critical_quench(1.5)[0]
    q0 = -sc.minimum(1.5)[0]
    periods = []
    for dl in (1e-2, 1e-3, 1e-4):
        cp = sc.ClassicalParams(lam_c - dl, 0.5, -1.0)
        periods.append(sc.integrate_orbit(cp, q0, 0.0, 200.0).period)
    assert periods[0] < periods[1] < periods[2]
    # roughly equal increments per decade (log law)
    inc1, inc2 = periods[1] - periods[0], periods[2] - periods[1]
    assert abs(inc1 - inc2) < 0.3 * inc1
