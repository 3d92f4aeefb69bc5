"""Complex k-space grids, centered unitary DFTs, acquisition masks, and
conjugate-symmetry utilities shared by every reconstruction method.

Grids use matrix indexing: axis 0 is the phase-encode direction (lines,
index k), axis 1 is the frequency-encode direction (readout samples,
index n).  Physical indices are relative to the stored centers, so row i
holds phase encode k = i - center_k and column j holds readout sample
n = j - center_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GeometryParams:
    """Field-of-view half-widths (cm) and readout sampling interval (ms)."""

    fov_x: float
    fov_y: float
    delta_t: float

    def __post_init__(self):
        if self.fov_x <= 0 or self.fov_y <= 0 or self.delta_t <= 0:
            raise ValueError("geometry parameters must be strictly positive")

    @property
    def delta_v(self) -> float:
        """Phase-encode spatial-frequency step, 1/(2*fov_y) per cm."""
        return 1.0 / (2.0 * self.fov_y)


@dataclass
class ComplexGrid:
    """2D complex sample grid with an explicit zero-frequency location."""

    data: np.ndarray
    center_k: int
    center_n: int

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.ndim != 2:
            raise ValueError("grid data must be 2D")
        ny, nx = self.data.shape
        if not (0 <= self.center_k < ny and 0 <= self.center_n < nx):
            raise ValueError("grid centers out of range")

    @property
    def ny(self) -> int:
        return self.data.shape[0]

    @property
    def nx(self) -> int:
        return self.data.shape[1]

    @classmethod
    def zeros(cls, ny: int, nx: int) -> "ComplexGrid":
        return cls(np.zeros((ny, nx), dtype=np.complex128), ny // 2, nx // 2)

    @classmethod
    def from_array(cls, data: np.ndarray) -> "ComplexGrid":
        """Wrap an array with the default centers (N//2 on each axis)."""
        data = np.asarray(data, dtype=np.complex128)
        return cls(data, data.shape[0] // 2, data.shape[1] // 2)

    def k_values(self) -> np.ndarray:
        """Physical phase-encode indices for each row."""
        return np.arange(self.ny) - self.center_k

    def n_values(self) -> np.ndarray:
        """Physical readout-sample indices for each column."""
        return np.arange(self.nx) - self.center_n

    def at(self, k: int, n: int) -> complex:
        """Sample at physical indices (k, n)."""
        return self.data[k + self.center_k, n + self.center_n]

    def copy(self) -> "ComplexGrid":
        return ComplexGrid(self.data.copy(), self.center_k, self.center_n)

    def same_shape(self, other: "ComplexGrid") -> bool:
        return (
            self.data.shape == other.data.shape
            and self.center_k == other.center_k
            and self.center_n == other.center_n
        )


@dataclass(frozen=True)
class AcquisitionMask:
    """Partial acquisition map: sample (k, n) is acquired iff k >= -q and
    n >= -m in physical indices.

    q == center_k and m == center_n describe complete coverage along the
    respective axis (the full-coverage sentinel used in tests and by the
    CLI when no truncation is requested).
    """

    ny: int
    nx: int
    center_k: int
    center_n: int
    q: int
    m: int

    def __post_init__(self):
        if not (0 <= self.center_k < self.ny and 0 <= self.center_n < self.nx):
            raise ValueError("mask centers out of range")
        if not (0 <= self.q <= self.center_k):
            raise ValueError(f"q must be in [0, {self.center_k}]")
        if not (0 <= self.m <= self.center_n):
            raise ValueError(f"m must be in [0, {self.center_n}]")

    @classmethod
    def for_grid(cls, grid: ComplexGrid, q: int, m: int) -> "AcquisitionMask":
        return cls(grid.ny, grid.nx, grid.center_k, grid.center_n, q, m)

    @classmethod
    def complete(cls, grid: ComplexGrid) -> "AcquisitionMask":
        return cls.for_grid(grid, grid.center_k, grid.center_n)

    @property
    def complete_k(self) -> bool:
        return self.q == self.center_k

    @property
    def complete_n(self) -> bool:
        return self.m == self.center_n

    @property
    def is_complete(self) -> bool:
        return self.complete_k and self.complete_n

    def acquired(self) -> np.ndarray:
        """Boolean (ny, nx) map of acquired samples."""
        k = np.arange(self.ny) - self.center_k
        n = np.arange(self.nx) - self.center_n
        return (k[:, None] >= -self.q) & (n[None, :] >= -self.m)

    def matches(self, grid: ComplexGrid) -> bool:
        return (
            self.ny == grid.ny
            and self.nx == grid.nx
            and self.center_k == grid.center_k
            and self.center_n == grid.center_n
        )


def _check_match(grid: ComplexGrid, mask: AcquisitionMask) -> None:
    if not mask.matches(grid):
        raise ValueError("grid and mask shapes/centers do not match")


def _centered_fft(data: np.ndarray, centers, axes, inverse: bool) -> np.ndarray:
    """Unitary FFT with the zero index of each transformed axis at the
    stated center rather than at index 0."""
    shifts = tuple(-c for c in centers)
    rolled = np.roll(data, shifts, axis=axes)
    if inverse:
        out = np.fft.ifftn(rolled, axes=axes, norm="ortho")
    else:
        out = np.fft.fftn(rolled, axes=axes, norm="ortho")
    return np.roll(out, centers, axis=axes)


def dft2_centered(grid: ComplexGrid, inverse: bool = False) -> ComplexGrid:
    """Centered, unitary 2D DFT (1/sqrt(ny*nx) scaling both ways)."""
    out = _centered_fft(grid.data, (grid.center_k, grid.center_n), (0, 1), inverse)
    return ComplexGrid(out, grid.center_k, grid.center_n)


def dft_rows_centered(grid: ComplexGrid, inverse: bool = False) -> ComplexGrid:
    """Centered unitary 1D DFT of each row (along the frequency-encode axis)."""
    out = _centered_fft(grid.data, (grid.center_n,), (1,), inverse)
    return ComplexGrid(out, grid.center_k, grid.center_n)


def dft_cols_centered(grid: ComplexGrid, inverse: bool = False) -> ComplexGrid:
    """Centered unitary 1D DFT of each column (along the phase-encode axis)."""
    out = _centered_fft(grid.data, (grid.center_k,), (0,), inverse)
    return ComplexGrid(out, grid.center_k, grid.center_n)


def frequency_weight(grid: ComplexGrid, geom: GeometryParams) -> ComplexGrid:
    """Multiply each line by j*2*pi*k*delta_v (Fourier-derivative weighting
    along the phase-encode index; the k = 0 line maps to zero)."""
    w = 1j * 2.0 * np.pi * grid.k_values() * geom.delta_v
    return ComplexGrid(grid.data * w[:, None], grid.center_k, grid.center_n)


def inverse_frequency_weight(
    grid: ComplexGrid, geom: GeometryParams, preserve_dc_from: ComplexGrid
) -> ComplexGrid:
    """Undo `frequency_weight`.  The k = 0 line is singular under the
    derivative weighting, so it is copied from `preserve_dc_from` (the
    acquired data; the central line is always acquired)."""
    if not grid.same_shape(preserve_dc_from):
        raise ValueError("preserve_dc_from must have identical shape and centers")
    k = grid.k_values().astype(float)
    w = 1j * 2.0 * np.pi * k * geom.delta_v
    w[grid.center_k] = 1.0  # placeholder; row replaced below
    out = grid.data / w[:, None]
    out[grid.center_k, :] = preserve_dc_from.data[grid.center_k, :]
    return ComplexGrid(out, grid.center_k, grid.center_n)


def apply_mask(grid: ComplexGrid, mask: AcquisitionMask) -> ComplexGrid:
    """Copy acquired samples, zero the missing ones."""
    _check_match(grid, mask)
    out = np.where(mask.acquired(), grid.data, 0.0 + 0.0j)
    return ComplexGrid(out, grid.center_k, grid.center_n)


def conjugate_reflect(grid: ComplexGrid, mask: AcquisitionMask) -> ComplexGrid:
    """Fill missing samples with the conjugate of their point reflection:
    grid(k, n) <- conj(grid(-k, -n)) wherever (-k, -n) is acquired.
    Acquired samples are untouched; missing samples with no acquired
    mirror stay as they are (zero for a zero-filled input)."""
    _check_match(grid, mask)
    ny, nx = grid.ny, grid.nx
    ck, cn = grid.center_k, grid.center_n
    acq = mask.acquired()
    out = grid.data.copy()

    rows = np.arange(ny)
    cols = np.arange(nx)
    mr = 2 * ck - rows  # row index of physical -k
    mc = 2 * cn - cols  # column index of physical -n
    valid = (mr >= 0) & (mr < ny)
    validc = (mc >= 0) & (mc < nx)
    mirror_ok = valid[:, None] & validc[None, :]

    mr_c = np.clip(mr, 0, ny - 1)
    mc_c = np.clip(mc, 0, nx - 1)
    mirror_acq = np.zeros((ny, nx), dtype=bool)
    mirror_acq[mirror_ok] = acq[mr_c[:, None], mc_c[None, :]][mirror_ok]

    fill = ~acq & mirror_ok & mirror_acq
    mirror_vals = np.conj(grid.data[mr_c[:, None], mc_c[None, :]])
    out[fill] = mirror_vals[fill]
    return ComplexGrid(out, ck, cn)
