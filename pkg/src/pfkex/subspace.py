"""Signal-subspace compensation of accumulated prediction error.

The positive phase encodes of each frequency-weighted column are cast into
a prediction matrix whose columns are one-sample-shifted windows; classical
Gram-Schmidt factors that matrix into orthogonal basis vectors times a
unit-diagonal upper-triangular coefficient matrix.  Iteratively predicted
negative-side samples are projected onto the span of the basis, which
strips the error component lying outside the signal subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pfkex.grids import AcquisitionMask, ComplexGrid

RANK_EPS = 1e-12
REORTH_EPS = 1e-8


@dataclass
class SubspaceBasis:
    """Unnormalized orthogonal basis V with S = V B, B unit-diagonal upper
    triangular; norms[i] = <v_i, v_i>.  Columns with negligible norm are
    flagged inactive and excluded from projections."""

    vectors: np.ndarray  # (length, count), columns orthogonal
    coeff_matrix: np.ndarray  # (count, count) upper triangular, unit diagonal
    norms: np.ndarray
    active: np.ndarray  # bool per column

    @property
    def length(self) -> int:
        return self.vectors.shape[0]

    @property
    def count(self) -> int:
        return self.vectors.shape[1]


def build_prediction_matrix(weighted: ComplexGrid, n: int, L: int) -> np.ndarray:
    """(L+1)-column matrix of shifted windows of the positive phase-encode
    samples at frequency-encode column `n`.  Column order follows the
    shift index i = L..0; consecutive columns advance by one sample."""
    if not 0 <= n < weighted.nx:
        raise ValueError("column index out of range")
    pos = weighted.data[weighted.center_k :, n]  # k = 0 .. k_max
    K = len(pos)
    if L + 1 > K:
        raise ValueError("order too large for the positive-side line count")
    width = K - L
    cols = [pos[L - i : L - i + width] for i in range(L, -1, -1)]
    return np.stack(cols, axis=1)


def _gs_pass(columns: np.ndarray):
    """One classical Gram-Schmidt sweep (no normalization)."""
    length, count = columns.shape
    v = columns.astype(np.complex128).copy()
    b = np.eye(count, dtype=np.complex128)
    norms = np.zeros(count)
    max_norm = 0.0
    for j in range(count):
        for i in range(j):
            if norms[i] <= RANK_EPS * max(max_norm, 1e-300):
                continue
            coeff = np.vdot(v[:, i], v[:, j]) / norms[i]
            b[i, j] = coeff
            v[:, j] = v[:, j] - coeff * v[:, i]
        norms[j] = np.vdot(v[:, j], v[:, j]).real
        max_norm = max(max_norm, norms[j])
    return v, b, norms


def gram_schmidt(columns: np.ndarray) -> SubspaceBasis:
    """Classical Gram-Schmidt factorization S = V B with a second sweep
    whenever the first leaves residual non-orthogonality."""
    columns = np.asarray(columns, dtype=np.complex128)
    if columns.ndim != 2 or columns.shape[1] < 1:
        raise ValueError("need a 2D matrix with at least one column")
    v, b, norms = _gs_pass(columns)

    max_norm = norms.max() if len(norms) else 0.0
    gram = v.conj().T @ v
    off = np.abs(gram - np.diag(np.diag(gram))).max() if v.shape[1] > 1 else 0.0
    if off > REORTH_EPS * max(max_norm, 1e-300):
        v, b2, norms = _gs_pass(v)
        b = b2 @ b  # product of unit-diagonal upper triangulars
        max_norm = norms.max()

    active = norms > RANK_EPS * max(max_norm, 1e-300)
    return SubspaceBasis(vectors=v, coeff_matrix=b, norms=norms, active=active)


def project(x: np.ndarray, basis: SubspaceBasis) -> np.ndarray:
    """Orthogonal projection of x onto the span of the active basis
    vectors: x_hat = sum_i (<v_i, x> / theta_i) v_i."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (basis.length,):
        raise ValueError("vector length does not match the basis")
    out = np.zeros_like(x)
    for i in range(basis.count):
        if not basis.active[i]:
            continue
        out += (np.vdot(basis.vectors[:, i], x) / basis.norms[i]) * basis.vectors[:, i]
    return out


def compensate(
    weighted_extrapolated: ComplexGrid,
    mask: AcquisitionMask,
    steps: int,
    L: int | None = None,
) -> ComplexGrid:
    """Replace the `steps` predicted lines of every column by their
    projection onto the positive-side signal subspace.

    The vector fed to the projection is the tail window of the working
    sequence (basis-window length, ascending k, starting at the deepest
    predicted line), so the predictions sit in their natural context.
    Only the predicted samples are written back; acquired samples are
    never modified.
    """
    if not mask.matches(weighted_extrapolated):
        raise ValueError("grid and mask do not match")
    if steps < 0 or steps > weighted_extrapolated.center_k - mask.q:
        raise ValueError("steps out of range")
    if steps == 0:
        return weighted_extrapolated.copy()

    grid = weighted_extrapolated
    q = mask.q
    K = grid.ny - grid.center_k  # positive-side line count (k >= 0)
    if L is None:
        L = growing_order_default(q, steps)
    width = K - L
    if L + 1 > K or width <= steps:
        raise ValueError("order too large for the positive-side line count")

    out = grid.copy()
    # rows of k = -(q+steps) .. -(q+1)  (ascending k)
    pred_rows = grid.center_k - q - np.arange(steps, 0, -1)
    win_rows = grid.center_k - q - steps + np.arange(width)
    for col in range(grid.nx):
        matrix = build_prediction_matrix(grid, col, L)
        basis = gram_schmidt(matrix)
        if not basis.active.any():
            continue
        proj = project(grid.data[win_rows, col], basis)
        out.data[pred_rows, col] = proj[:steps]
    return out


def growing_order_default(q: int, steps: int) -> int:
    """Default basis order: the final prediction order of the iterated
    extrapolation, floor((q + steps) / 2)."""
    return max(1, (q + steps) // 2)


def compensation_errors(s_true, s_pred, s_comp) -> tuple[float, float]:
    """Law-of-cosines error norms before and after compensation:
    e = ||t||^2 + ||s||^2 - 2 ||t|| ||s|| cos(theta) with
    cos(theta) = Re<t, s> / (||t|| ||s||)."""
    s_true = np.asarray(s_true, dtype=np.complex128)
    s_pred = np.asarray(s_pred, dtype=np.complex128)
    s_comp = np.asarray(s_comp, dtype=np.complex128)
    if not (s_true.shape == s_pred.shape == s_comp.shape):
        raise ValueError("vectors must have equal length")

    def one(t, s):
        nt = np.linalg.norm(t)
        ns = np.linalg.norm(s)
        if nt == 0 or ns == 0:
            raise ValueError("zero-norm input")
        cos = np.vdot(t, s).real / (nt * ns)
        return float(nt * nt + ns * ns - 2.0 * nt * ns * cos)

    return one(s_true, s_pred), one(s_true, s_comp)
