"""Linear prediction of missing negative phase-encode lines.

Prediction runs in the frequency-weighted (derivative-domain) k-space,
one frequency-encode column at a time.  Real and imaginary parts carry
separate coefficient sets, estimated per step by Levinson recursion on the
unbiased autocorrelation of the working sequence; each predicted sample is
appended to the sequence before the next step, and the order grows with
the fractional-line count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pfkex.grids import AcquisitionMask, ComplexGrid


class LevinsonError(ValueError):
    """Degenerate (silent or non-positive-definite) autocorrelation input."""


def unbiased_autocorr(x: np.ndarray, max_lag: int) -> np.ndarray:
    """r(l) = (1/(N-l)) sum_i x(i) x(i+l) for l = 0..max_lag."""
    x = np.asarray(x, dtype=float)
    N = len(x)
    if max_lag >= N:
        raise ValueError("max_lag must be smaller than the sequence length")
    return np.array([np.dot(x[: N - l], x[l:]) / (N - l) for l in range(max_lag + 1)])


def levinson(r: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Solve the order-L Yule-Walker system Toeplitz(r[0:L]) b = -r[1:L+1]
    by Levinson-Durbin recursion (one quadrature).

    Returns the coefficients b of the predictor x_hat(n) = -sum b(l) x(n-l)
    and the final prediction-error power.
    """
    r = np.asarray(r, dtype=float)
    if order < 1:
        raise ValueError("order must be at least 1")
    if len(r) < order + 1:
        raise ValueError("need order+1 autocorrelation lags")
    if r[0] <= 0:
        raise LevinsonError("autocorrelation at lag 0 must be positive")

    # Unbiased lag estimates of marginally predictable data (noiseless
    # sinusoids) are not guaranteed positive definite and can push a
    # reflection coefficient past the stability boundary; coefficients are
    # clamped to [-1, 1] so the predictor stays minimum-phase instead of
    # spraying spikes into the extrapolation.
    b = np.zeros(0)
    power = r[0]
    for i in range(1, order + 1):
        if power == 0.0:
            # an earlier order already predicts perfectly; keep it, pad zeros
            return np.concatenate([b, np.zeros(order - len(b))]), 0.0
        acc = r[i] + (np.dot(b, r[i - 1 : 0 : -1]) if i > 1 else 0.0)
        k = min(1.0, max(-1.0, -acc / power))
        if i > 1:
            b = np.concatenate([b + k * b[::-1], [k]])
        else:
            b = np.array([k])
        power *= 1.0 - k * k
    return b, max(power, 0.0)


@dataclass
class PredictorState:
    """One-step predictor: per-quadrature coefficients plus the summed
    residual power of the Levinson fits."""

    order: int
    coeffs_re: np.ndarray
    coeffs_im: np.ndarray
    residual_power: float

    def __post_init__(self):
        self.coeffs_re = np.asarray(self.coeffs_re, dtype=float)
        self.coeffs_im = np.asarray(self.coeffs_im, dtype=float)
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if len(self.coeffs_re) != self.order or len(self.coeffs_im) != self.order:
            raise ValueError("coefficient arrays must have length = order")
        if self.residual_power < 0:
            raise ValueError("residual power must be non-negative")

    @classmethod
    def from_coeffs(cls, coeffs_re, coeffs_im=None) -> "PredictorState":
        coeffs_re = np.asarray(coeffs_re, dtype=float)
        if coeffs_im is None:
            coeffs_im = coeffs_re.copy()
        return cls(len(coeffs_re), coeffs_re, coeffs_im, 0.0)

    @classmethod
    def fit(cls, seq: np.ndarray, order: int) -> "PredictorState":
        """Levinson fits on the unbiased autocorrelations of the real and
        imaginary parts of `seq`."""
        seq = np.asarray(seq)
        b_re, p_re = levinson(unbiased_autocorr(seq.real, order), order)
        b_im, p_im = levinson(unbiased_autocorr(seq.imag, order), order)
        return cls(order, b_re, b_im, p_re + p_im)


def predict_next(x: np.ndarray, state: PredictorState):
    """One-step prediction x_hat = -sum_{l=1..L} b(l) x(last-l+1).

    Real input uses the real-part coefficients; complex input predicts the
    two quadratures independently.
    """
    x = np.asarray(x)
    L = state.order
    if len(x) < L:
        raise ValueError("sequence shorter than the predictor order")
    tail = x[-1 : -L - 1 : -1]  # x(last), x(last-1), ...
    if np.iscomplexobj(x):
        return complex(
            -np.dot(state.coeffs_re, tail.real) - 1j * np.dot(state.coeffs_im, tail.imag)
        )
    return float(-np.dot(state.coeffs_re, tail.real))


def growing_order(q: int, step: int) -> int:
    """Prediction order at iteration `step` (1-based): half the current
    fractional-line count, floor((q + step) / 2)."""
    return (q + step) // 2


def _column_sequence(grid: ComplexGrid, col: int, q: int) -> np.ndarray:
    """Available line values ordered from most-positive k down to k = -q."""
    rows = np.arange(grid.ny - 1, grid.center_k - q - 1, -1)
    return grid.data[rows, col]


def _tolerant_state(arr: np.ndarray, order: int, floor: float) -> PredictorState | None:
    """Predictor for a working sequence; a silent quadrature gets zero
    coefficients, a fully silent column gets no predictor at all."""
    r_re = unbiased_autocorr(arr.real, order)
    r_im = unbiased_autocorr(arr.imag, order)
    re_silent = r_re[0] <= floor
    im_silent = r_im[0] <= floor
    if re_silent and im_silent:
        return None
    b_re, p_re = (np.zeros(order), 0.0) if re_silent else levinson(r_re, order)
    b_im, p_im = (np.zeros(order), 0.0) if im_silent else levinson(r_im, order)
    return PredictorState(order, b_re, b_im, p_re + p_im)


def _check_extrapolation_args(weighted: ComplexGrid, mask: AcquisitionMask, steps: int):
    if not mask.matches(weighted):
        raise ValueError("grid and mask do not match")
    if steps < 0 or steps > weighted.center_k - mask.q:
        raise ValueError("steps exceeds the available room below k = -q")
    if steps > 0 and mask.q < 1:
        raise ValueError("prediction needs at least one fractional line (q >= 1)")


def iterated_extrapolate(weighted: ComplexGrid, mask: AcquisitionMask, steps: int) -> ComplexGrid:
    """Extend each column of the frequency-weighted partial k-space by
    `steps` lines in the negative phase-encode direction, re-estimating the
    predictor from the updated sequence at every step."""
    _check_extrapolation_args(weighted, mask, steps)
    if steps == 0:
        return weighted.copy()

    q = mask.q
    out = weighted.copy()
    floor = (1e-12 * max(np.abs(weighted.data).max(), 1e-300)) ** 2
    for col in range(weighted.nx):
        seq = list(_column_sequence(weighted, col, q))
        for step in range(1, steps + 1):
            arr = np.asarray(seq)
            state = _tolerant_state(arr, growing_order(q, step), floor)
            if state is None:
                break  # silent column (outside the object): leave zeros
            value = predict_next(arr, state)
            seq.append(value)
            out.data[mask.center_k - (q + step), col] = value
    return out


def fixed_extrapolate(weighted: ComplexGrid, mask: AcquisitionMask, steps: int) -> ComplexGrid:
    """Comparison mode: one predictor estimated from the initial sequence
    (order floor((q+1)/2)) extrapolates every line."""
    _check_extrapolation_args(weighted, mask, steps)
    if steps == 0:
        return weighted.copy()

    q = mask.q
    out = weighted.copy()
    floor = (1e-12 * max(np.abs(weighted.data).max(), 1e-300)) ** 2
    order = (q + 1) // 2
    for col in range(weighted.nx):
        seq = list(_column_sequence(weighted, col, q))
        state = _tolerant_state(np.asarray(seq), max(order, 1), floor)
        if state is None:
            continue
        for step in range(1, steps + 1):
            value = predict_next(np.asarray(seq), state)
            seq.append(value)
            out.data[mask.center_k - (q + step), col] = value
    return out
