"""Phase-space diagnostics: Wigner transforms, purity and negative volume."""

import math
import subprocess
import sys

import numpy as np
import pytest

from catquench.errors import ExtentError
from catquench.hilbert import ModelParams
from catquench.phasespace import (WignerGrid, default_axes, marginals,
                                  negativity, purity, wigner,
                                  wigner_from_components)
from catquench.pipeline import build_context
from catquench.quench import (QuenchSpec, evolve, reduced_density,
                              spin_coherent_state)
from oracles import wigner_point_rescaled

PARAMS = ModelParams(0.5, 20.0, 1.5, 0.5, n_max=40)


def _vacuum_grid(extent=1.0, n=121, params=PARAMS):
    weights = np.array([1.0])
    vec = np.zeros((params.n_max + 1, 1), dtype=complex)
    vec[0, 0] = 1.0
    ax = np.linspace(-extent, extent, n)
    return wigner_from_components(weights, vec, params, ax, ax.copy())


def test_wigner_grid_shape_validation():
    ax = np.linspace(-1, 1, 5)
    with pytest.raises(ValueError):
        WignerGrid(ax, ax, np.zeros((5, 4)), 0.0)
    with pytest.raises(ValueError):
        wigner_from_components(np.array([1.0]),
                              np.zeros((41, 1), dtype=complex), PARAMS,
                              np.array([0.0, 0.3, 1.0]),   # nonuniform axis
                              np.linspace(-1, 1, 5))


def test_vacuum_peak_value_and_norm():
    # ground oscillator state: W(0, 0) = 2jR / pi in rescaled coordinates
    w = _vacuum_grid()
    i0 = len(w.q_axis) // 2
    assert abs(w.values[i0, i0] - 20.0 / math.pi) < 1e-10
    assert abs(w.integrate() - 1.0) < 1e-6
    assert w.norm_residual < 1e-6
    assert negativity(w) < 1e-8


def test_displaced_state_against_direct_integral_oracle():
    # random low-rank density cross-checked pointwise against a direct
    # Simpson evaluation of the Wigner integral
    rng = np.random.default_rng(3)
    n_levels = 14
    params = ModelParams(0.5, 4.0, 1.0, 0.0, n_max=n_levels - 1)
    v = rng.normal(size=(n_levels, 2)) + 1j * rng.normal(size=(n_levels, 2))
    v, _ = np.linalg.qr(v)
    weights = np.array([0.7, 0.3])
    ax = np.linspace(-2.0, 2.0, 41)
    w = wigner_from_components(weights, v, params, ax, ax.copy())
    rho_std = (v * weights) @ v.conj().T
    for iq, ip in ((20, 20), (7, 31), (33, 12), (15, 26)):
        ref = wigner_point_rescaled(rho_std, ax[iq], ax[ip], 2 * 0.5 * 4.0)
        assert abs(w.values[iq, ip] - ref) < 1e-8


def test_purity_identity_with_wigner_square(headline_ctx):
    # gamma = (2 pi / 2jR) int W^2 dq dp
    psi = evolve(headline_ctx.psi0, headline_ctx.decomp_fi, 18.0)
    rho = reduced_density(psi)
    ax_q, ax_p = default_axes(extent=1.6, n_points=241)
    w = wigner(rho, headline_ctx.params_fi, ax_q, ax_p)
    gamma_w = (2.0 * math.pi / 20.0) * w.integrate(w.values ** 2)
    assert abs(gamma_w - purity(rho)) / purity(rho) < 1e-3
    assert 1.0 / 2.0 <= purity(rho) <= 1.0 + 1e-12


def test_cat_state_is_negative_but_coherent_is_not(headline_ctx):
    ax_q, ax_p = default_axes(extent=1.6, n_points=241)
    w0 = wigner(reduced_density(headline_ctx.psi0), headline_ctx.params_in,
                ax_q, ax_p)
    assert negativity(w0) < 1e-4             # initial packet is near-coherent
    psi_cat = evolve(headline_ctx.psi0, headline_ctx.decomp_fi, 33.0)
    w_cat = wigner(reduced_density(psi_cat), headline_ctx.params_fi, ax_q, ax_p)
    assert negativity(w_cat) > 0.05          # interference fringes go negative


def test_negativity_raises_on_truncated_extent(headline_ctx):
    psi = evolve(headline_ctx.psi0, headline_ctx.decomp_fi, 33.0)
    rho = reduced_density(psi)
    ax = np.linspace(-0.4, 0.4, 81)          # far too small for the cat
    w = wigner(rho, headline_ctx.params_fi, ax, ax.copy())
    with pytest.raises(ExtentError):
        negativity(w)


def test_marginals_normalized():
    w = _vacuum_grid(extent=1.2, n=161)
    prob_q, prob_p = marginals(w)
    assert abs(np.trapezoid(prob_q, w.q_axis) - 1.0) < 1e-6
    assert abs(np.trapezoid(prob_p, w.p_axis) - 1.0) < 1e-6
    # vacuum q marginal is a Gaussian of variance 1/(4jR)
    var = np.trapezoid(prob_q * w.q_axis ** 2, w.q_axis)
    assert abs(var - 1.0 / 40.0) < 1e-6


def test_resolution_guard():
    # grid step much coarser than the fringe scale triggers a warning
    coarse = np.linspace(-1.5, 1.5, 4)
    with pytest.warns(RuntimeWarning, match="undersample"):
        wigner_from_components(np.array([1.0]),
                               np.eye(41, 1, dtype=complex), PARAMS,
                               coarse, coarse.copy())


def test_backends_agree():
    # the pure-numpy fallback must reproduce the jitted kernel bit-for-bit
    # at the 1e-12 level; compare through a subprocess with CATQ_BACKEND set
    code = (
        "import numpy as np\n"
        "from catquench.hilbert import ModelParams\n"
        "from catquench.phasespace import wigner_from_components\n"
        "rng = np.random.default_rng(11)\n"
        "v = rng.normal(size=(21, 2)) + 1j * rng.normal(size=(21, 2))\n"
        "v, _ = np.linalg.qr(v)\n"
        "params = ModelParams(0.5, 10.0, 1.0, 0.0, n_max=20)\n"
        "ax = np.linspace(-1.5, 1.5, 61)\n"
        "w = wigner_from_components(np.array([0.6, 0.4]), v, params, ax, ax.copy())\n"
        "np.save('/tmp/_wig_backend.npy', w.values)\n"
    )
    vals = {}
    for backend in ("numba", "numpy"):
        import os
        env = dict(os.environ, CATQ_BACKEND=backend)
        subprocess.run([sys.executable, "-c", code], check=True, env=env)
        vals[backend] = np.load("/tmp/_wig_backend.npy")
    diff = np.abs(vals["numba"] - vals["numpy"]).max()
    assert diff < 1e-12


def test_spin_coherent_state_normalized():
    for j in (0.5, 2.0):
        chi = spin_coherent_state(j, -j, np.array([0.3, -0.2, 0.9]))
        assert abs(np.linalg.norm(chi) - 1.0) < 1e-12
