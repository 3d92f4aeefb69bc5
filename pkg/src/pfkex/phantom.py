"""Digital brain phantom: concentric ellipses carrying 1.5 T tissue values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (rho, T1 ms, T2 ms) at 1.5 T
TISSUES = {
    "wm": (0.65, 650.0, 80.0),
    "gm": (0.80, 950.0, 100.0),
    "csf": (0.90, 4000.0, 2000.0),
}

BACKGROUND, WM, GM, CSF = 0, 1, 2, 3


@dataclass
class TissueMap:
    """Per-voxel proton density and relaxation times on an n x n grid."""

    rho: np.ndarray
    t1_ms: np.ndarray
    t2_ms: np.ndarray
    labels: np.ndarray  # region ids (BACKGROUND/WM/GM/CSF)

    def __post_init__(self):
        if not (self.rho.shape == self.t1_ms.shape == self.t2_ms.shape == self.labels.shape):
            raise ValueError("tissue maps must share one shape")

    @property
    def n(self) -> int:
        return self.rho.shape[0]


def _ellipse(n: int, semi_y: float, semi_x: float) -> np.ndarray:
    c = n // 2
    y = (np.arange(n) - c)[:, None]
    x = (np.arange(n) - c)[None, :]
    return (y / semi_y) ** 2 + (x / semi_x) ** 2 <= 1.0


def brain_phantom(n: int) -> TissueMap:
    """Axial-slice phantom: a CSF core inside a gray-matter ring inside a
    white-matter ring, with empty background outside.

    The concentric-ellipse layout gives straight, well-separated edges so
    truncation ringing and its suppression are easy to measure.
    """
    if n < 32:
        raise ValueError("phantom grid must be at least 32 voxels across")

    wm_mask = _ellipse(n, 0.40 * n, 0.34 * n)
    gm_mask = _ellipse(n, 0.27 * n, 0.22 * n)
    csf_mask = _ellipse(n, 0.13 * n, 0.095 * n)

    labels = np.full((n, n), BACKGROUND, dtype=np.int8)
    labels[wm_mask] = WM
    labels[gm_mask] = GM
    labels[csf_mask] = CSF

    rho = np.zeros((n, n))
    t1 = np.full((n, n), 1.0)
    t2 = np.full((n, n), 1.0)
    for name, label in (("wm", WM), ("gm", GM), ("csf", CSF)):
        r, a, b = TISSUES[name]
        sel = labels == label
        rho[sel] = r
        t1[sel] = a
        t2[sel] = b
    return TissueMap(rho=rho, t1_ms=t1, t2_ms=t2, labels=labels)
