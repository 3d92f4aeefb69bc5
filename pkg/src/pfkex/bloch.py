"""Bloch-equation spin-echo simulator.

Each excitation acquires one phase-encode line.  Per line the magnetization
of every spin is taken through: an alpha-degree RF pulse about y, the
phase-encode pulse (lambda_samples * delta_t long), a free-precession gap
that places the echo center at te_ms, the dephasing lobe of the readout
gradient, and the readout itself (one sample every delta_t).  The complex
signal is the quadrature-detected sum of transverse magnetization over all
spins and voxels; lines are visited in reverse-centric order.

`rf_rotate` and `propagate` are the literal single-spin propagators;
`simulate_spin_echo` evaluates the same chain in closed form, vectorized
over voxels and spins (readout phase rates are constant, so the per-sample
propagators collapse into a running complex ratio).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from pfkex.grids import AcquisitionMask, ComplexGrid, apply_mask
from pfkex.phantom import TissueMap

# proton gyromagnetic ratio, rad / (s T)
GAMMA = 2.6752218744e8


@dataclass(frozen=True)
class SpinEnsemble:
    """Discretized off-resonance spectrum of one voxel class."""

    omegas: np.ndarray  # rad/s
    weights: np.ndarray  # spectral amplitudes H(w_i) * dw, sum to 1

    def __post_init__(self):
        if np.any(self.weights < 0):
            raise ValueError("spectral weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > 1e-6:
            raise ValueError("spectral weights must sum to 1")

    @property
    def n_f(self) -> int:
        return len(self.omegas)


def lorentzian_ensemble(t2_ms: float, n_f: int, bandwidth_hz: float) -> SpinEnsemble:
    """Spins spread uniformly over [-pi*F, pi*F] rad/s with Lorentzian
    amplitudes of half-width 1/T2', where T2' = 0.3 * T2."""
    if n_f < 3:
        raise ValueError("need at least 3 spins")
    if n_f % 2 == 0:
        raise ValueError("spin count must be odd (symmetric about omega=0)")
    if bandwidth_hz <= 0 or t2_ms <= 0:
        raise ValueError("bandwidth and T2 must be positive")
    omegas = np.linspace(-np.pi * bandwidth_hz, np.pi * bandwidth_hz, n_f)
    hw = 1e3 / (0.3 * t2_ms)  # rad/s
    weights = hw / (hw * hw + omegas * omegas)
    weights /= weights.sum()
    return SpinEnsemble(omegas=omegas, weights=weights)


@dataclass(frozen=True)
class SequenceParams:
    """Spin-echo sequence settings (times in ms, gradients in T/cm)."""

    te_ms: float
    trep_ms: float
    alpha_deg: float
    lambda_samples: int
    gx: float
    gy: float
    delta_t_ms: float
    bandwidth_hz: float
    n_f: int = 31
    fov_x_cm: float = 12.0
    fov_y_cm: float = 12.0

    def __post_init__(self):
        if self.te_ms >= self.trep_ms:
            raise ValueError("echo time must be shorter than the repetition interval")
        if self.lambda_samples < 1:
            raise ValueError("phase-encode pulse needs at least one sample")
        if min(self.delta_t_ms, self.bandwidth_hz, self.fov_x_cm, self.fov_y_cm) <= 0:
            raise ValueError("sampling interval, bandwidth, and FOV must be positive")


def default_sequence(n: int, **overrides) -> SequenceParams:
    """Sequence whose gradients put every voxel exactly on a DFT frequency
    bin: gamma * gx * (2 fov_x) * dt / 1e3 = 2 pi, and gy = gx / lambda."""
    fov = float(overrides.pop("fov_cm", 12.0))
    dt = float(overrides.pop("delta_t_ms", 0.02))
    lam = int(overrides.pop("lambda_samples", 2))
    gx = overrides.pop("gx", None)
    if gx is None:
        gx = 2.0 * np.pi * 1e3 / (GAMMA * 2.0 * fov * dt)
    gy = overrides.pop("gy", None)
    if gy is None:
        gy = gx / lam
    te = overrides.pop("te_ms", None)
    if te is None:
        te = lam * dt + 2 * (n // 2) * dt + 1.0
    params = dict(
        te_ms=te,
        trep_ms=15000.0,
        alpha_deg=90.0,
        lambda_samples=lam,
        gx=gx,
        gy=gy,
        delta_t_ms=dt,
        bandwidth_hz=1e3 / dt,
        n_f=31,
        fov_x_cm=fov,
        fov_y_cm=fov,
    )
    params.update(overrides)
    return SequenceParams(**params)


def rf_rotate(m, alpha_deg: float) -> np.ndarray:
    """Rotate a magnetization vector by alpha degrees about the y axis."""
    a = np.deg2rad(alpha_deg)
    rot = np.array(
        [
            [np.cos(a), 0.0, np.sin(a)],
            [0.0, 1.0, 0.0],
            [-np.sin(a), 0.0, np.cos(a)],
        ]
    )
    return rot @ np.asarray(m, dtype=float)


def init_magnetization(rho: float, weight: float) -> float:
    """Initial longitudinal magnetization of one spin: rho * H(w_i)*dw."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("proton density must lie in [0, 1]")
    if weight < 0:
        raise ValueError("spectral weight must be non-negative")
    return rho * weight


def propagate(m, t_ms: float, t1_ms: float, t2_ms: float, phi_rad: float) -> np.ndarray:
    """Relaxation + precession over t_ms with total accumulated phase
    phi_rad: m -> A m + B with A = diag(E2, E2, E1) Rz(phi) and
    B = (0, 0, 1 - E1)."""
    if t_ms < 0:
        raise ValueError("propagation time must be non-negative")
    m = np.asarray(m, dtype=float)
    e2 = np.exp(-t_ms / t2_ms)
    e1 = np.exp(-t_ms / t1_ms)
    c, s = np.cos(phi_rad), np.sin(phi_rad)
    out = np.array(
        [
            e2 * (c * m[0] - s * m[1]),
            e2 * (s * m[0] + c * m[1]),
            e1 * m[2] + (1.0 - e1),
        ]
    )
    return out


def steady_state_longitudinal(t1_ms: float, trep_ms: float, alpha_deg: float) -> float:
    """Longitudinal fraction just before each pulse under repeated
    alpha-degree excitation every trep_ms (ideal transverse spoiling)."""
    e1 = np.exp(-trep_ms / t1_ms)
    return (1.0 - e1) / (1.0 - np.cos(np.deg2rad(alpha_deg)) * e1)


def reverse_centric_order(ny: int, center_k: int) -> list[int]:
    """Physical phase-encode ordering: highest k down through 0, then the
    negative steps in decreasing order."""
    top = list(range(ny - 1 - center_k, -1, -1))
    bottom = list(range(-1, -center_k - 1, -1))
    return top + bottom


def _gradient_rates(seq: SequenceParams, n: int):
    """Per-voxel gradient precession rates w(x), w(y) in rad/s."""
    c = n // 2
    offs = np.arange(n) - c
    x_cm = offs * (2.0 * seq.fov_x_cm / n)
    y_cm = offs * (2.0 * seq.fov_y_cm / n)
    return GAMMA * seq.gx * x_cm, GAMMA * seq.gy * y_cm


def _timings(seq: SequenceParams, n: int):
    c = n // 2
    dt = seq.delta_t_ms
    t_pe = seq.lambda_samples * dt
    t_deph = c * dt
    t_free = seq.te_ms - t_pe - 2.0 * t_deph
    if t_free < -1e-12:
        raise ValueError(
            f"te_ms={seq.te_ms} too short: needs at least {t_pe + 2 * t_deph} ms "
            "for the phase-encode pulse, dephasing lobe, and half readout"
        )
    return t_pe, max(t_free, 0.0), t_deph


def _voxel_spin_tables(tissue: TissueMap, seq: SequenceParams):
    """Flattened (voxel, spin) tables for every voxel with signal."""
    ys, xs = np.nonzero(tissue.rho > 0)
    rho = tissue.rho[ys, xs]
    t1 = tissue.t1_ms[ys, xs]
    t2 = tissue.t2_ms[ys, xs]
    labels = tissue.labels[ys, xs]

    omegas = None
    weight_rows = np.zeros((int(labels.max()) + 1, seq.n_f)) if len(labels) else None
    for lab in np.unique(labels):
        t2_lab = tissue.t2_ms[tissue.labels == lab].flat[0]
        ens = lorentzian_ensemble(t2_lab, seq.n_f, seq.bandwidth_hz)
        omegas = ens.omegas
        weight_rows[lab] = ens.weights
    weights = weight_rows[labels] if len(labels) else None
    return ys, xs, rho, t1, t2, weights, omegas


def simulate_spin_echo(
    tissue: TissueMap,
    seq: SequenceParams,
    noise_std: float = 0.0,
    rng_seed: int = 0,
) -> ComplexGrid:
    """Full k-space of the phantom under the spin-echo sequence, with
    additive complex Gaussian noise of std `noise_std` per quadrature."""
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    n = tissue.n
    c = n // 2
    dt = seq.delta_t_ms
    t_pe, t_free, t_deph = _timings(seq, n)
    w_x, w_y = _gradient_rates(seq, n)
    alpha = np.deg2rad(seq.alpha_deg)

    grid = np.zeros((n, n), dtype=np.complex128)
    ys, xs, rho, t1, t2, weights, omegas = _voxel_spin_tables(tissue, seq)
    if len(ys):
        ss = steady_state_longitudinal(t1, seq.trep_ms, seq.alpha_deg)
        t_pre = t_pe + t_free + t_deph  # elapsed time at the first readout sample
        # (voxel, spin) amplitude at readout start and per-sample ratio;
        # quadrature detection conjugates the transverse phase
        amp = (rho * ss * np.sin(alpha) * np.exp(-t_pre / t2))[:, None] * weights
        base_phase = (
            omegas[None, :] * t_pre - w_x[xs][:, None] * t_deph
        ) / 1e3
        value = amp * np.exp(-1j * base_phase)
        ratio = np.exp(-dt / t2)[:, None] * np.exp(
            -1j * (omegas[None, :] + w_x[xs][:, None]) * dt / 1e3
        )

        # intermediate sum over voxels of each image row, per readout sample
        inter = np.zeros((n, n), dtype=np.complex128)
        cur = value.copy()
        for j in range(n):
            if j:
                cur *= ratio
            per_voxel = cur.sum(axis=1)
            inter[:, j] = np.bincount(
                ys, weights=per_voxel.real, minlength=n
            ) + 1j * np.bincount(ys, weights=per_voxel.imag, minlength=n)

        # phase-encode kernel: line k applies -k * w(y) * lambda * dt phase
        k_phys = np.arange(n) - c
        pe = np.exp(-1j * np.outer(k_phys, w_y * seq.lambda_samples * dt / 1e3))
        grid = pe @ inter

    if noise_std > 0:
        rng = np.random.default_rng(rng_seed)
        for k in reverse_centric_order(n, c):
            row = k + c
            grid[row] += rng.normal(0.0, noise_std, n)
            grid[row] += 1j * rng.normal(0.0, noise_std, n)

    return ComplexGrid(grid, c, c)


def reference_image(tissue: TissueMap, seq: SequenceParams) -> np.ndarray:
    """Per-voxel transverse signal magnitude at the echo center: the map
    the reconstruction should reproduce (up to the unitary-DFT scale)."""
    n = tissue.n
    out = np.zeros((n, n))
    alpha = np.deg2rad(seq.alpha_deg)
    for lab in np.unique(tissue.labels):
        if lab == 0:
            continue
        sel = tissue.labels == lab
        t1 = tissue.t1_ms[sel].flat[0]
        t2 = tissue.t2_ms[sel].flat[0]
        ens = lorentzian_ensemble(t2, seq.n_f, seq.bandwidth_hz)
        envelope = np.abs(np.sum(ens.weights * np.exp(-1j * ens.omegas * seq.te_ms / 1e3)))
        ss = steady_state_longitudinal(t1, seq.trep_ms, seq.alpha_deg)
        out[sel] = tissue.rho[sel] * ss * np.sin(alpha) * np.exp(-seq.te_ms / t2) * envelope
    return out


def truncate_acquisition(full: ComplexGrid, q: int, m: int):
    """Keep the fractional acquisition (q negative lines, m dephasing-lobe
    columns): returns the zero-filled grid and its mask."""
    mask = AcquisitionMask.for_grid(full, q, m)
    return apply_mask(full, mask), mask
