"""Binary grid format "CKS1".

Layout: magic bytes ``CKS1``, little-endian u32 ny, u32 nx, u32 center_k,
u32 center_n, then ny*nx pairs of little-endian float64 (real, imag) in
row-major order.  Write -> read round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from pfkex.grids import ComplexGrid

MAGIC = b"CKS1"
_HEADER = struct.Struct("<4sIIII")


def write_grid(path, grid: ComplexGrid) -> None:
    ny, nx = grid.ny, grid.nx
    header = _HEADER.pack(MAGIC, ny, nx, grid.center_k, grid.center_n)
    pairs = np.empty((ny, nx, 2), dtype="<f8")
    pairs[..., 0] = grid.data.real
    pairs[..., 1] = grid.data.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pairs.tobytes())


def read_grid(path) -> ComplexGrid:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated CKS1 header")
    magic, ny, nx, center_k, center_n = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a CKS1 file")
    expected = _HEADER.size + ny * nx * 16
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    pairs = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(ny, nx, 2)
    data = pairs[..., 0] + 1j * pairs[..., 1]
    return ComplexGrid(data, center_k, center_n)
