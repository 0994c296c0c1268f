"""Serialization: WIGv1 binary grids, CSV tables and JSON run manifests."""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from . import __version__
from .phasespace import WignerGrid

WIG_MAGIC = b"WIGv1"

ENERGY_ZERO_NOTE = ("h = H/(2jR*omega); decoupled (lambda=0) ground state at e=0")
BASIS_ORDER_NOTE = ("index = n*(2j+1) + (m_z + j); n outer 0..n_max, m_z inner -j..+j")


def write_wig(path: str | Path, grid: WignerGrid) -> None:
    """WIGv1: magic, little-endian u32 nq, u32 np, f64 extents, row-major f64
    values with q as the outer (row) index."""
    nq, n_p = len(grid.q_axis), len(grid.p_axis)
    header = WIG_MAGIC + struct.pack(
        "<IIdddd", nq, n_p, grid.q_axis[0], grid.q_axis[-1],
        grid.p_axis[0], grid.p_axis[-1])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(grid.values, dtype="<f8").tobytes())


def read_wig(path: str | Path) -> WignerGrid:
    with open(path, "rb") as fh:
        magic = fh.read(len(WIG_MAGIC))
        if magic != WIG_MAGIC:
            raise ValueError(f"not a WIGv1 file: magic {magic!r}")
        nq, n_p, qmin, qmax, pmin, pmax = struct.unpack("<IIdddd", fh.read(40))
        values = np.frombuffer(fh.read(nq * n_p * 8), dtype="<f8").reshape(nq, n_p)
    q_axis = np.linspace(qmin, qmax, nq)
    p_axis = np.linspace(pmin, pmax, n_p)
    norm = abs(float(np.trapezoid(np.trapezoid(values, p_axis, axis=1), q_axis)) - 1.0)
    return WignerGrid(q_axis, p_axis, values.copy(), norm)


def write_csv(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v
                             for v in row])


def write_manifest(path: str | Path, config: dict, n_max: int,
                   residuals: dict | None = None, extra: dict | None = None) -> None:
    """Run manifest: everything needed to reproduce the file bit-for-bit."""
    doc = {
        "code_version": __version__,
        "config": config,
        "n_max": n_max,
        "basis_ordering": BASIS_ORDER_NOTE,
        "energy_zero": ENERGY_ZERO_NOTE,
        "residuals": residuals or {},
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
