"""Command-line driver reproducing the figure-level data products.

Subcommands: spectrum | quench | wigner | scan | second-quench.
Configuration comes from an INI-style file (key = value sections) with
command-line flags taking precedence.  Exit codes: 0 success, 1 config
error, 2 numerical failure, 3 convergence/resource abort.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ConfigError, ConvergenceError, NumericalError
from .hilbert import ModelParams, build_hamiltonian
from .io import write_csv, write_manifest, write_wig
from .phasespace import marginals, wigner_from_components
from .pipeline import (build_context, run_second_quench, run_series,
                       schmidt_components)
from .quench import QuenchSpec, evolve
from .semiclassics import (ClassicalParams, amplitudes, balanced_quench,
                           branch_energies, critical_quench, integrate_orbit,
                           minimum, mixing_angle, weak_coupling_frequency)
from .spectrum import assign_peaks, diagonalize, strength_function

DEFAULTS = {
    "j": 0.5,
    "R": 20.0,
    "lambda_in": 1.5,
    "lambda_fi": -0.283,
    "delta": 0.5,
    "omega": 1.0,
    "nmax": 0,                    # 0 = adaptive
    "prep_method": "doublet_superposition",
    "times": "0:80:161",
    "grid": "301x301",
    "extent": (1.5, 1.5),
    "formats": "csv,wig,json",
    "lambda_grid": "-1.6:1.6:65",
    "lambda_fi_grid": "-1:1:41",
    "switch_time": 30.0,
}

_KNOWN_KEYS = {
    "model": {"j", "r", "delta", "omega", "nmax"},
    "quench": {"lambda_in", "lambda_fi", "times", "prep_method", "switch_time"},
    "output": {"grid", "extent", "formats"},
    "scan": {"lambda_fi_grid"},
    "spectrum": {"lambda_grid"},
}


def _parse_times(spec: str) -> np.ndarray:
    """Either 'start:end:n' (arithmetic grid) or a comma list of times."""
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(x) for x in spec.split(",")])
    except ValueError as exc:
        raise ConfigError(f"cannot parse time spec {spec!r}: {exc}")


def _parse_grid(spec: str) -> tuple[int, int]:
    try:
        nq, n_p = spec.lower().split("x")
        return int(nq), int(n_p)
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid spec {spec!r}: {exc}")


def _load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}")
    if not read:
        raise ConfigError(f"config file {path} not found or unreadable")
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            name = "R" if key == "r" else key
            if name in ("j", "R", "delta", "omega", "lambda_in", "lambda_fi",
                        "switch_time"):
                cfg[name] = float(value)
            elif name == "nmax":
                cfg[name] = int(value)
            elif name == "extent":
                parts = [float(v) for v in value.split()]
                cfg[name] = (parts[0], parts[-1])
            else:
                cfg[name] = value
    return cfg


def _apply_flags(cfg: dict, args: argparse.Namespace) -> dict:
    mapping = {
        "j": "j", "R": "R", "lambda_in": "lambda_in", "lambda_fi": "lambda_fi",
        "delta": "delta", "nmax": "nmax", "grid": "grid", "times": "times",
        "format": "formats", "prep_method": "prep_method",
        "lambda_grid": "lambda_grid", "lambda_fi_grid": "lambda_fi_grid",
        "switch_time": "switch_time",
    }
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "extent", None) is not None:
        cfg["extent"] = tuple(args.extent)
    return cfg


def _axes(cfg: dict) -> tuple[np.ndarray, np.ndarray]:
    nq, n_p = _parse_grid(cfg["grid"])
    eq, ep = cfg["extent"]
    return np.linspace(-eq, eq, nq), np.linspace(-ep, ep, n_p)


def _spec(cfg: dict) -> QuenchSpec:
    try:
        return QuenchSpec(cfg["lambda_in"], cfg["lambda_fi"], cfg["j"], cfg["R"],
                          cfg["delta"], cfg["omega"], cfg["prep_method"],
                          _parse_times(cfg["times"]))
    except ValueError as exc:
        raise ConfigError(str(exc))


def _workers() -> int:
    env = os.environ.get("CATQ_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _config_snapshot(cfg: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()}


def cmd_spectrum(cfg: dict, out: Path) -> None:
    """Eigenvalues over a lambda grid plus the quench strength function."""
    lam_grid = _parse_times(cfg["lambda_grid"])
    spec = _spec(cfg)
    ctx = build_context(spec, n_max=cfg["nmax"])

    rows = []
    for lam in lam_grid:
        params = spec.model_params(float(lam), ctx.n_max)
        decomp = diagonalize(build_hamiltonian(params))
        rows.extend((float(lam), k, float(e), int(p))
                    for k, (e, p) in enumerate(zip(decomp.energies,
                                                   decomp.parities)))
    write_csv(out / "spectrum.csv", ["lambda", "k", "energy", "parity"], rows)

    sf = strength_function(ctx.psi0.amplitudes, ctx.decomp_fi)
    centroids = branch_energies(spec.lambda_in, spec.lambda_fi, spec.j, spec.delta)
    sf = assign_peaks(sf, centroids)
    write_csv(out / "strength.csv", ["e_k", "weight", "assigned_m"],
              zip(sf.energies.tolist(), sf.weights.tolist(),
                  sf.assigned_m.tolist()))
    residuals = {
        "total_weight": abs(sf.total_weight() - 1.0),
        "mean_energy_vs_expectation": abs(
            sf.mean_energy()
            - float(np.real(ctx.psi0.amplitudes.conj()
                            @ build_hamiltonian(ctx.params_fi).entries
                            @ ctx.psi0.amplitudes))),
    }
    write_manifest(out / "strength.json", _config_snapshot(cfg), ctx.n_max,
                   residuals, {"peak_weights": {str(k): v for k, v
                                                in sf.peak_weights.items()}})


def cmd_quench(cfg: dict, out: Path) -> None:
    """Time series t, <q>, <p>, J, P(t), purity, negativity + manifest."""
    spec = _spec(cfg)
    ctx = build_context(spec, n_max=cfg["nmax"])
    q_axis, p_axis = _axes(cfg)
    series = run_series(ctx, with_negativity=True, q_axis=q_axis, p_axis=p_axis)
    _write_series(out, cfg, ctx.n_max, series)


def _write_series(out: Path, cfg: dict, n_max: int, series) -> None:
    nu = series.negativity if series.negativity is not None \
        else np.full_like(series.times, np.nan)
    rows = zip(series.times.tolist(), series.q_mean.tolist(),
               series.p_mean.tolist(), series.j_mean[0].tolist(),
               series.j_mean[1].tolist(), series.j_mean[2].tolist(),
               series.survival.tolist(), series.purity.tolist(), nu.tolist())
    write_csv(out / "timeseries.csv",
              ["t", "q_mean", "p_mean", "Jx", "Jy", "Jz", "survival",
               "purity", "negativity"], rows)
    write_manifest(out / "manifest.json", _config_snapshot(cfg), n_max,
                   series.residuals)


def cmd_wigner(cfg: dict, out: Path) -> None:
    """One WIGv1 grid per frame time, marginals, classical-orbit overlay."""
    spec = _spec(cfg)
    ctx = build_context(spec, n_max=cfg["nmax"])
    q_axis, p_axis = _axes(cfg)
    times = spec.time_grid
    block = evolve(ctx.psi0, ctx.decomp_fi, times)
    formats = cfg["formats"].split(",")

    def one_frame(k: int):
        psi = block[:, k] / np.linalg.norm(block[:, k])
        w, v = schmidt_components(psi, ctx.n_max, ctx.psi0.basis.n_spin)
        grid = wigner_from_components(w, v, ctx.params_fi, q_axis, p_axis)
        stem = out / f"frame_{k:04d}"
        if "wig" in formats:
            write_wig(stem.with_suffix(".wig"), grid)
        if "csv" in formats and len(q_axis) * len(p_axis) <= 250_000:
            rows = ((float(q_axis[i]), float(p_axis[jj]), float(grid.values[i, jj]))
                    for i in range(len(q_axis)) for jj in range(len(p_axis)))
            write_csv(stem.with_suffix(".csv"), ["q", "p", "W"], rows)
        prob_q, prob_p = marginals(grid)
        if len(q_axis) == len(p_axis):
            write_csv(out / f"marginals_{k:04d}.csv",
                      ["q", "prob_q", "p", "prob_p"],
                      zip(q_axis.tolist(), prob_q.tolist(),
                          p_axis.tolist(), prob_p.tolist()))
        write_manifest(stem.with_suffix(".json"), _config_snapshot(cfg),
                       ctx.n_max, {"norm_residual": grid.norm_residual},
                       {"time": float(times[k])})

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        list(pool.map(one_frame, range(len(times))))

    # classical overlay: one orbit per mu subspace from the frozen start point
    q0, _, _ = minimum(abs(spec.lambda_in))
    rows = []
    two_j = int(round(2 * spec.j))
    for k in range(two_j + 1):
        mu = (-spec.j + k) / spec.j
        cp = ClassicalParams(spec.lambda_fi, spec.delta, mu)
        orbit = integrate_orbit(cp, -q0, 0.0, float(times[-1]) + 1e-9,
                                n_samples=max(len(times), 400))
        interp_q = np.interp(times, orbit.times, orbit.q)
        interp_p = np.interp(times, orbit.times, orbit.p)
        rows.extend((float(t), mu, float(qv), float(pv))
                    for t, qv, pv in zip(times, interp_q, interp_p))
    write_csv(out / "orbits.csv", ["t", "mu", "q", "p"], rows)


def cmd_scan(cfg: dict, out: Path) -> None:
    """Cat-state parameter scan over lambda_fi (weights + periods)."""
    spec = _spec(cfg)
    lam_fis = _parse_times(cfg["lambda_fi_grid"])
    ctx = build_context(spec, n_max=cfg["nmax"])
    j = spec.j
    ms = [-j + k for k in range(int(round(2 * j)) + 1)]
    q0, _, _ = minimum(abs(spec.lambda_in))

    def one_point(lam_fi: float):
        params_fi = spec.model_params(lam_fi, ctx.n_max)
        decomp = diagonalize(build_hamiltonian(params_fi))
        sf = strength_function(ctx.psi0.amplitudes, decomp)
        sf = assign_peaks(sf, branch_energies(spec.lambda_in, lam_fi, j,
                                              spec.delta))
        alphas = amplitudes(j, mixing_angle(spec.lambda_in, lam_fi))
        rows = []
        for k, m in enumerate(ms):
            mu = m / j
            cp = ClassicalParams(lam_fi, spec.delta, mu)
            orbit = integrate_orbit(cp, -q0, 0.0, 200.0, n_samples=200)
            try:
                t_weak = 2.0 * math.pi / weak_coupling_frequency(cp)[0]
            except Exception:
                t_weak = math.nan
            rows.append((float(lam_fi), m, float(alphas[k] ** 2),
                         sf.peak_weights[m], orbit.period, t_weak))
        return rows

    all_rows = []
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        for rows in pool.map(one_point, [float(v) for v in lam_fis]):
            all_rows.extend(rows)
    write_csv(out / "scan.csv",
              ["lambda_fi", "m", "weight_dfunction", "weight_quantum",
               "period_ode", "period_weak"], all_rows)
    lam_c = critical_quench(spec.lambda_in)[0]
    write_manifest(out / "scan.json", _config_snapshot(cfg), ctx.n_max, {},
                   {"lambda_fi_balanced": balanced_quench(spec.lambda_in),
                    "lambda_fi_critical": [lam_c, -lam_c]})


def cmd_second_quench(cfg: dict, out: Path) -> None:
    """Evolve to the switch time, turn the coupling off, continue under h(0)."""
    spec = _spec(cfg)
    ctx = build_context(spec, n_max=cfg["nmax"])
    t_s = float(cfg["switch_time"])
    series = run_second_quench(ctx, t_s, spec.time_grid,
                               with_negativity=True,
                               q_axis=_axes(cfg)[0], p_axis=_axes(cfg)[1])
    _write_series(out, cfg, ctx.n_max, series)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catquench",
        description="Multicomponent cat-state quench protocol toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("spectrum", cmd_spectrum), ("quench", cmd_quench),
                     ("wigner", cmd_wigner), ("scan", cmd_scan),
                     ("second-quench", cmd_second_quench)):
        p = sub.add_parser(name, help=fn.__doc__)
        p.set_defaults(func=fn)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--out", type=str, default=".")
        p.add_argument("--j", type=float)
        p.add_argument("--R", type=float)
        p.add_argument("--lambda-in", dest="lambda_in", type=float)
        p.add_argument("--lambda-fi", dest="lambda_fi", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--nmax", type=int, help="Fock truncation; 0 = adaptive")
        p.add_argument("--grid", type=str, help="NQxNP")
        p.add_argument("--extent", type=float, nargs=2, metavar=("Q", "P"))
        p.add_argument("--times", type=str,
                       help="'start:end:n' or comma-separated list")
        p.add_argument("--format", type=str, help="comma list of csv,wig,json")
        p.add_argument("--prep-method", dest="prep_method", type=str,
                       choices=["doublet_superposition", "coherent_product"])
        p.add_argument("--lambda-grid", dest="lambda_grid", type=str)
        p.add_argument("--lambda-fi-grid", dest="lambda_fi_grid", type=str)
        p.add_argument("--switch-time", dest="switch_time", type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_flags(_load_config(args.config), args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        args.func(cfg, out)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence abort: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
