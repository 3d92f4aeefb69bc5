"""Reference reconstructions: zero-fill, conjugate synthesis, homodyne, POCS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pfkex.grids import (
    AcquisitionMask,
    ComplexGrid,
    apply_mask,
    conjugate_reflect,
    dft2_centered,
)


@dataclass
class ReconResult:
    """A reconstructed image together with the k-space that produced it."""

    image: np.ndarray
    kspace_filled: ComplexGrid
    iterations: int = 0


def _require_match(partial: ComplexGrid, mask: AcquisitionMask) -> None:
    if not mask.matches(partial):
        raise ValueError("partial grid and mask do not match")


def zero_fill_recon(partial: ComplexGrid, mask: AcquisitionMask) -> ReconResult:
    """Magnitude of the inverse DFT of the zero-filled k-space."""
    _require_match(partial, mask)
    ks = apply_mask(partial, mask)
    image = np.abs(dft2_centered(ks, inverse=True).data)
    return ReconResult(image=image, kspace_filled=ks)


def conjugate_synthesis_recon(partial: ComplexGrid, mask: AcquisitionMask) -> ReconResult:
    """Fill missing samples by conjugate symmetry, then magnitude recon."""
    _require_match(partial, mask)
    ks = conjugate_reflect(apply_mask(partial, mask), mask)
    image = np.abs(dft2_centered(ks, inverse=True).data)
    return ReconResult(image=image, kspace_filled=ks)


def _axis_ramp(size: int, center: int, frac: int, complete: bool) -> np.ndarray:
    """Merging-filter weights along one axis: 2 beyond the symmetric band,
    a linear ramp 2 -> 0 across it, 0 where data is missing.  A complete
    axis needs no reweighting (uniform 1)."""
    if complete:
        return np.ones(size)
    idx = np.arange(size) - center
    w = np.zeros(size)
    w[idx > frac] = 2.0
    band = np.abs(idx) <= frac
    w[band] = 1.0 + idx[band] / frac
    return w


def _axis_window(size: int, center: int, frac: int, complete: bool) -> np.ndarray:
    """Raised-cosine window over the symmetric band used for the
    low-resolution phase estimate."""
    if complete:
        return np.ones(size)
    idx = np.arange(size) - center
    w = np.zeros(size)
    band = np.abs(idx) <= frac
    w[band] = 0.5 * (1.0 + np.cos(np.pi * idx[band] / frac))
    return w


def merging_filter(mask: AcquisitionMask) -> np.ndarray:
    """Separable 2D homodyne weighting: product of the per-axis ramps,
    capped at 2 so samples whose point mirror is missing in both axes keep
    the correct conjugate-pair weight instead of being double-counted."""
    wk = _axis_ramp(mask.ny, mask.center_k, mask.q, mask.complete_k)
    wn = _axis_ramp(mask.nx, mask.center_n, mask.m, mask.complete_n)
    return np.minimum(np.outer(wk, wn), 2.0)


def lowres_phase(partial: ComplexGrid, mask: AcquisitionMask) -> np.ndarray:
    """Phase of the apodized symmetric-band reconstruction."""
    wk = _axis_window(mask.ny, mask.center_k, mask.q, mask.complete_k)
    wn = _axis_window(mask.nx, mask.center_n, mask.m, mask.complete_n)
    windowed = ComplexGrid(
        partial.data * np.outer(wk, wn), partial.center_k, partial.center_n
    )
    low = dft2_centered(windowed, inverse=True).data
    return np.angle(low)


def homodyne_recon(partial: ComplexGrid, mask: AcquisitionMask) -> ReconResult:
    """Merging-filter weighting plus low-resolution phase correction; the
    image is the phase-corrected real part with negatives clipped."""
    _require_match(partial, mask)
    if (mask.q == 0 and not mask.complete_k) or (mask.m == 0 and not mask.complete_n):
        raise ValueError("homodyne needs symmetric coverage (q >= 1 and m >= 1)")
    ks = apply_mask(partial, mask)
    phase = lowres_phase(ks, mask)
    weighted = ComplexGrid(ks.data * merging_filter(mask), ks.center_k, ks.center_n)
    img_c = dft2_centered(weighted, inverse=True).data * np.exp(-1j * phase)
    image = np.clip(img_c.real, 0.0, None)
    filled = dft2_centered(
        ComplexGrid(image.astype(np.complex128), ks.center_k, ks.center_n)
    )
    return ReconResult(image=image, kspace_filled=filled)


def pocs_recon(
    partial: ComplexGrid,
    mask: AcquisitionMask,
    max_iters: int = 20,
    tol: float = 1e-4,
) -> ReconResult:
    """Alternate an image-domain phase projection (onto the low-resolution
    phase estimate) with k-space data consistency, starting from the
    homodyne solution.  Acquired samples of the result equal the input
    bit-exactly."""
    _require_match(partial, mask)
    if max_iters < 0:
        raise ValueError("max_iters must be non-negative")
    if tol <= 0:
        raise ValueError("tol must be positive")

    start = homodyne_recon(partial, mask)
    if max_iters == 0:
        return start

    ks_in = apply_mask(partial, mask)
    acq = mask.acquired()
    phase = lowres_phase(ks_in, mask)
    rot = np.exp(1j * phase)

    img = start.image.astype(np.complex128)
    prev = np.abs(img)
    ks = None
    iterations = 0
    for iterations in range(1, max_iters + 1):
        proj = (img * np.conj(rot)).real * rot
        ks = dft2_centered(ComplexGrid(proj, partial.center_k, partial.center_n))
        ks.data[acq] = ks_in.data[acq]
        img = dft2_centered(ks, inverse=True).data
        cur = np.abs(img)
        change = np.linalg.norm(cur - prev) / max(np.linalg.norm(prev), 1e-30)
        prev = cur
        if change < tol:
            break

    return ReconResult(image=prev, kspace_filled=ks, iterations=iterations)
