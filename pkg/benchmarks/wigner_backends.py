"""Compare the jitted and pure-numpy Wigner kernels on a realistic frame.

Runs the same Schmidt-rank-2 Wigner transform through both backends in
subprocesses (the backend is chosen at import time via CATQ_BACKEND),
reports wall times and the maximum pointwise difference.

Usage: python3 benchmarks/wigner_backends.py [n_points] [n_levels]
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

WORKER = """
import json, sys, time
import numpy as np
from catquench.hilbert import ModelParams
from catquench.kernels import active_backend
from catquench.phasespace import wigner_from_components

n_points, n_levels, out = int(sys.argv[1]), int(sys.argv[2]), sys.argv[3]
rng = np.random.default_rng(42)
v = rng.normal(size=(n_levels, 2)) + 1j * rng.normal(size=(n_levels, 2))
v, _ = np.linalg.qr(v)
weights = np.array([0.55, 0.45])
params = ModelParams(0.5, 20.0, 1.5, 0.5, n_max=n_levels - 1)
ax = np.linspace(-1.5, 1.5, n_points)

wigner_from_components(weights, v, params, ax, ax.copy())   # warm-up / JIT
t0 = time.perf_counter()
n_rep = 3
for _ in range(n_rep):
    grid = wigner_from_components(weights, v, params, ax, ax.copy())
elapsed = (time.perf_counter() - t0) / n_rep
np.save(out + ".npy", grid.values)
print(json.dumps({"backend": active_backend(), "seconds": elapsed}))
"""


def run(backend: str, n_points: int, n_levels: int, stem: str) -> dict:
    import os

    env = dict(os.environ, CATQ_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(n_points), str(n_levels), stem],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    n_points = int(sys.argv[1]) if len(sys.argv) > 1 else 301
    n_levels = int(sys.argv[2]) if len(sys.argv) > 2 else 120
    print(f"Wigner frame benchmark: {n_points}x{n_points} grid, "
          f"{n_levels} oscillator levels, Schmidt rank 2")
    results = {}
    with tempfile.TemporaryDirectory() as tmp:
        for backend in ("numba", "numpy"):
            stem = str(Path(tmp) / backend)
            info = run(backend, n_points, n_levels, stem)
            results[backend] = (info["seconds"], np.load(stem + ".npy"))
            print(f"  {info['backend']:>5}: {info['seconds']:.3f} s per frame")
    diff = np.abs(results["numba"][1] - results["numpy"][1]).max()
    speedup = results["numpy"][0] / results["numba"][0]
    print(f"  speedup (numpy/numba): {speedup:.1f}x")
    print(f"  max |difference|: {diff:.2e}")
    if diff > 1e-12:
        sys.exit("backends disagree beyond 1e-12")


if __name__ == "__main__":
    main()
