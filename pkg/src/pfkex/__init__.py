"""Partial-Fourier MR k-space extrapolation toolkit.

Simulates spin-echo k-space from a digital phantom, reconstructs images
from 2D partial k-space (zero-fill, conjugate synthesis, homodyne, POCS,
iterated linear prediction with subspace projection, least-squares FIR
filter banks), and quantifies artifact reduction.
"""

from pfkex.grids import (
    AcquisitionMask,
    ComplexGrid,
    GeometryParams,
    apply_mask,
    conjugate_reflect,
    dft2_centered,
    dft_cols_centered,
    dft_rows_centered,
    frequency_weight,
    inverse_frequency_weight,
)
from pfkex.cks import read_grid, write_grid

__version__ = "0.1.0"

__all__ = [
    "AcquisitionMask",
    "ComplexGrid",
    "GeometryParams",
    "apply_mask",
    "conjugate_reflect",
    "dft2_centered",
    "dft_cols_centered",
    "dft_rows_centered",
    "frequency_weight",
    "inverse_frequency_weight",
    "read_grid",
    "write_grid",
]
