"""Cross-module reconstruction flows for the prediction-based methods."""

from __future__ import annotations

import numpy as np

from pfkex.baseline import ReconResult, homodyne_recon
from pfkex.grids import (
    AcquisitionMask,
    ComplexGrid,
    GeometryParams,
    apply_mask,
    frequency_weight,
    inverse_frequency_weight,
)
from pfkex.lp import fixed_extrapolate, iterated_extrapolate
from pfkex.subspace import compensate

DEFAULT_GEOMETRY = GeometryParams(fov_x=12.0, fov_y=12.0, delta_t=0.02)


def lp_recon(
    partial: ComplexGrid,
    mask: AcquisitionMask,
    steps: int,
    mode: str = "iterated",
    geom: GeometryParams = DEFAULT_GEOMETRY,
    project_order: int | None = None,
) -> ReconResult:
    """Predict missing negative phase-encode lines, then phase-correct.

    Pipeline: derivative weighting of the zero-filled partial k-space,
    line extrapolation (`iterated`, `fixed`, or `projected` = iterated plus
    subspace compensation), inverse weighting with the acquired central
    line preserved, and a homodyne reconstruction that treats the
    predicted lines as acquired (effective fractional count q + steps).
    """
    if mode not in ("iterated", "fixed", "projected"):
        raise ValueError(f"unknown lp mode: {mode!r}")
    if not mask.matches(partial):
        raise ValueError("grid and mask do not match")

    ks_in = apply_mask(partial, mask)
    weighted = frequency_weight(ks_in, geom)
    if mode == "fixed":
        extended = fixed_extrapolate(weighted, mask, steps)
    else:
        extended = iterated_extrapolate(weighted, mask, steps)
        if mode == "projected":
            extended = compensate(extended, mask, steps, L=project_order)
    unweighted = inverse_frequency_weight(extended, geom, preserve_dc_from=ks_in)

    # acquired samples stay bit-exact; only the predicted lines are added
    merged = ks_in.copy()
    acq = mask.acquired()
    merged.data[~acq] = unweighted.data[~acq]

    eff_mask = AcquisitionMask(
        mask.ny, mask.nx, mask.center_k, mask.center_n, mask.q + steps, mask.m
    )
    corrected = homodyne_recon(merged, eff_mask)
    return ReconResult(image=corrected.image, kspace_filled=merged, iterations=steps)
