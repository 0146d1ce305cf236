"""Field serialisation: plot-ready CSV and the "WVS1" binary format.

WVS1 layout (all little-endian)::

    b"WVS1"
    uint64 n_scales, uint64 n_positions
    float64[n_scales]      scale values
    float64[n_positions]   position values
    float64[2 * n_scales * n_positions]  (re, im) pairs, row-major scales x positions
"""
from __future__ import annotations

import struct

import numpy as np

MAGIC = b"WVS1"
FORMATS = ("csv", "wvs1")
SUFFIX = {"csv": ".csv", "wvs1": ".wvs"}


def export_field(field, path, fmt: str = "wvs1"):
    """Write a WaveletField or PotentialField; raises OSError on I/O failure."""
    scales = field.grid.scales
    positions = field.grid.positions
    coeffs = field.coefficients
    if fmt == "csv":
        aa, bb = np.meshgrid(scales, positions, indexing="ij")
        table = np.column_stack([aa.ravel(), bb.ravel(), coeffs.real.ravel(), coeffs.imag.ravel()])
        np.savetxt(path, table, fmt="%.17g", delimiter=",", header="a,b,re,im", comments="")
    elif fmt == "wvs1":
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<QQ", len(scales), len(positions)))
            fh.write(np.asarray(scales, dtype="<f8").tobytes())
            fh.write(np.asarray(positions, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(coeffs, dtype="<c16").tobytes())
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def read_wvs1(path):
    """Return (scales, positions, coefficients) from a WVS1 file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a WVS1 file")
    n_s, n_b = struct.unpack_from("<QQ", data, 4)
    off = 20
    scales = np.frombuffer(data, dtype="<f8", count=n_s, offset=off)
    off += 8 * n_s
    positions = np.frombuffer(data, dtype="<f8", count=n_b, offset=off)
    off += 8 * n_b
    coeffs = np.frombuffer(data, dtype="<c16", count=n_s * n_b, offset=off).reshape(n_s, n_b)
    if off + 16 * n_s * n_b != len(data):
        raise ValueError(f"{path}: truncated or oversized WVS1 payload")
    return scales.copy(), positions.copy(), coeffs.copy()
