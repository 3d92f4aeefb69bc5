"""Per-row least-squares FIR filters for partial-echo filling.

Model rows come from the 1D row transforms of a denoised phase-corrected
low-resolution image.  Each row's filter expresses a sample as an FIR
combination of symmetrically reflected past samples; a conjugated block in
the least-squares system enforces the quasi-symmetry of the row spectrum.
The fitted filters then run on the row transforms of the raw partial data,
synthesizing the echo samples truncated from the dephasing lobe.  No
derivative (frequency) weighting appears anywhere in this pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from pfkex.baseline import ReconResult, homodyne_recon
from pfkex.grids import (
    AcquisitionMask,
    ComplexGrid,
    apply_mask,
    dft2_centered,
    dft_cols_centered,
    dft_rows_centered,
)


def nlm_denoise(image: np.ndarray, search_radius: int = 5, patch_radius: int = 1, h: float = None) -> np.ndarray:
    """Non-local means: every pixel becomes the normalized
    exp(-||patch diff||^2 / h^2)-weighted average over its
    (2*search_radius+1)^2 search window.  Boundaries are mirrored."""
    t, f = search_radius, patch_radius
    if not t >= f >= 1:
        raise ValueError("need search_radius >= patch_radius >= 1")
    image = np.asarray(image, dtype=float)
    if h is None:
        h = 0.1 * (image.max() - image.min())
    if h <= 0:
        raise ValueError("filter strength h must be positive")

    H, W = image.shape
    pad = t + f
    padded = np.pad(image, pad, mode="reflect")
    patch_size = 2 * f + 1
    num = np.zeros((H, W))
    den = np.zeros((H, W))
    # region large enough that the patch box sum at every image pixel is valid
    core = padded[t : t + H + 2 * f, t : t + W + 2 * f]
    for dy in range(-t, t + 1):
        for dx in range(-t, t + 1):
            shifted = padded[t + dy : t + dy + H + 2 * f, t + dx : t + dx + W + 2 * f]
            diff2 = (core - shifted) ** 2
            ssd = ndimage.uniform_filter(diff2, size=patch_size) * patch_size**2
            w = np.exp(-ssd[f : f + H, f : f + W] / (h * h))
            num += w * shifted[f : f + H, f : f + W]
            den += w
    return num / den


def build_ls_system(row: np.ndarray, center: int, Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the two-block least-squares system Psi = -Lambda a for one
    intermediate-space row.

    Upper block: sample n (n = Q .. n_max) against the reflected lags
    -(n-1) .. -(n-Q).  Lower block: conjugated samples and conjugated lags
    at depths -(j+1) .. -(j+Q), which pins the quasi-symmetric reading of
    the same filter.  Each block has n_pos - Q rows (n_pos = count of
    samples with n >= 0).
    """
    row = np.asarray(row, dtype=np.complex128)
    nx = len(row)
    P = nx - 1 - center  # largest positive sample index
    n_pos = P + 1
    if Q < 1:
        raise ValueError("filter order must be at least 1")
    if Q >= n_pos or Q > center:
        raise ValueError("filter order too large for this row length")

    i_idx = np.arange(1, Q + 1)
    n_idx = np.arange(Q, P + 1)
    upper_rhs = row[center + n_idx]
    upper_lam = row[center + (i_idx[None, :] - n_idx[:, None])]

    j_idx = np.arange(0, P - Q + 1)
    lower_rhs = np.conj(row[center + j_idx])
    lower_lam = np.conj(row[center - (j_idx[:, None] + i_idx[None, :])])

    psi = np.concatenate([upper_rhs, lower_rhs])
    lam = np.vstack([upper_lam, lower_lam])
    return psi, lam


def solve_fir(psi: np.ndarray, lam: np.ndarray, rcond: float | None = None) -> tuple[np.ndarray, float]:
    """Least-squares filter coefficients: minimize ||Psi + Lambda a||_2.

    Rank-deficient systems take the minimum-norm solution; `rcond` sets the
    relative singular-value cutoff below which directions count as
    deficient (None keeps the exact least-squares solution).
    """
    psi = np.asarray(psi, dtype=np.complex128)
    lam = np.asarray(lam, dtype=np.complex128)
    if lam.ndim != 2 or lam.shape[0] == 0 or lam.shape[1] == 0:
        raise ValueError("empty least-squares system")
    if lam.shape[0] < lam.shape[1]:
        raise ValueError("system needs at least as many rows as coefficients")
    coeffs, *_ = np.linalg.lstsq(lam, -psi, rcond=rcond)
    residual = float(np.linalg.norm(psi + lam @ coeffs))
    return coeffs, residual


@dataclass
class FirBank:
    """One FIR coefficient vector per image row."""

    coeffs: np.ndarray  # (n_rows, Q) complex
    residuals: np.ndarray  # (n_rows,)

    def __post_init__(self):
        if self.coeffs.ndim != 2 or len(self.residuals) != self.coeffs.shape[0]:
            raise ValueError("coefficients and residuals disagree on row count")
        if np.any(self.residuals < 0):
            raise ValueError("residual norms must be non-negative")

    @property
    def n_rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def order(self) -> int:
        return self.coeffs.shape[1]


def fit_fir_bank(model: ComplexGrid, Q: int, rcond: float | None = None) -> FirBank:
    """Estimate one filter per row of the model intermediate space."""
    coeffs = np.zeros((model.ny, Q), dtype=np.complex128)
    residuals = np.zeros(model.ny)
    for y in range(model.ny):
        psi, lam = build_ls_system(model.data[y], model.center_n, Q)
        coeffs[y], residuals[y] = solve_fir(psi, lam, rcond=rcond)
    return FirBank(coeffs=coeffs, residuals=residuals)


def apply_fir_fill(row: np.ndarray, center: int, coeffs: np.ndarray, m: int) -> np.ndarray:
    """Synthesize the missing dephasing-lobe samples of one row.

    Samples at n = -(m+1), -(m+2), ... are generated by the reflected
    recursion psi(-n) = -sum_i conj(a_i) psi(n-i) (the conjugate reading of
    the filter, extended to negative indices exactly as the lower
    least-squares block enforces).  Acquired samples are never modified.
    """
    row = np.asarray(row, dtype=np.complex128)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    nx = len(row)
    Q = len(coeffs)
    if m < 0 or m > center:
        raise ValueError("fractional count m out of range")
    if m == center:
        return row.copy()
    if Q > 2 * m + 1 or Q >= nx - center:
        raise ValueError("filter order incompatible with this row/mask")

    out = row.copy()
    a_conj = np.conj(coeffs)
    for n in range(m + 1, center + 1):
        lags = out[center + n - Q : center + n][::-1]  # psi(n-1) .. psi(n-Q)
        out[center - n] = -np.dot(a_conj, lags)
    return out


def default_fir_order(mask: AcquisitionMask) -> int:
    """floor(m/3), clamped to the geometrically valid range."""
    n_pos = mask.nx - mask.center_n
    return int(np.clip(mask.m // 3, 1, min(2 * mask.m + 1, n_pos - 1, mask.center_n)))


# Relative singular-value cutoff for the bank fit.  The model-row systems
# are nearly rank deficient (smooth spectra with junk tails); keeping the
# tiny singular directions produces filters with enormous gain that spray
# amplified artifacts over the filled band.
BANK_RCOND = 0.2


def fir_recon(
    partial: ComplexGrid,
    mask: AcquisitionMask,
    Q: int | None = None,
    nlm_t: int = 5,
    nlm_f: int = 1,
    nlm_h: float | None = None,
) -> ReconResult:
    """Full filter-bank pipeline.

    A homodyne reconstruction supplies the phase-corrected input image;
    the non-local-means denoised copy of it provides the model rows for
    filter estimation, and the filters then resynthesize the truncated
    dephasing-lobe band of the input image's own row transforms.  The
    final image is the clipped real part, matching the homodyne
    convention.  No derivative weighting appears anywhere in this path.
    """
    if not mask.matches(partial):
        raise ValueError("grid and mask do not match")
    ks_in = apply_mask(partial, mask)

    if mask.complete_n:
        # nothing to fill along the readout axis: the pipeline reduces to
        # a straight reconstruction of the input
        image = np.abs(dft2_centered(ks_in, inverse=True).data)
        return ReconResult(image=image, kspace_filled=ks_in)

    seed = homodyne_recon(partial, mask)
    denoised = nlm_denoise(seed.image, nlm_t, nlm_f, nlm_h)
    model = dft_rows_centered(
        ComplexGrid(denoised.astype(np.complex128), partial.center_k, partial.center_n)
    )
    if Q is None:
        Q = default_fir_order(mask)
    bank = fit_fir_bank(model, Q, rcond=BANK_RCOND)

    inter = dft_rows_centered(
        ComplexGrid(seed.image.astype(np.complex128), partial.center_k, partial.center_n)
    )
    filled = inter.copy()
    for y in range(inter.ny):
        filled.data[y] = apply_fir_fill(inter.data[y], inter.center_n, bank.coeffs[y], mask.m)

    ks_filled = dft_cols_centered(filled)
    image = np.clip(dft_rows_centered(filled, inverse=True).data.real, 0.0, None)
    return ReconResult(image=image, kspace_filled=ks_filled)
