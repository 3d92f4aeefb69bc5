"""Quantitative evaluation: CNR, Canny-edge artifact error, RMSE."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class RoiSpec:
    """Named set of (row, col) pixels."""

    label: str
    pixels: tuple  # of (row, col)

    def __post_init__(self):
        if len(self.pixels) == 0:
            raise ValueError("ROI must contain at least one pixel")
        if any(r < 0 or c < 0 for r, c in self.pixels):
            raise ValueError("ROI indices must be non-negative")

    @classmethod
    def from_pixels(cls, label: str, pixels) -> "RoiSpec":
        return cls(label, tuple((int(r), int(c)) for r, c in pixels))

    def values(self, image: np.ndarray) -> np.ndarray:
        rows = np.array([p[0] for p in self.pixels])
        cols = np.array([p[1] for p in self.pixels])
        if rows.max() >= image.shape[0] or cols.max() >= image.shape[1]:
            raise ValueError(f"ROI '{self.label}' exceeds the image bounds")
        return image[rows, cols]


def cnr(image: np.ndarray, roi_a: RoiSpec, roi_b: RoiSpec, roi_noise: RoiSpec) -> float:
    """(mean(a) - mean(b)) / std(noise), unbiased noise std."""
    sets = [set(r.pixels) for r in (roi_a, roi_b, roi_noise)]
    for i in range(3):
        for j in range(i + 1, 3):
            if sets[i] & sets[j]:
                raise ValueError("ROIs must be disjoint")
    noise = roi_noise.values(image)
    sigma = noise.std(ddof=1)
    if sigma == 0:
        raise ValueError("noise ROI has zero variance")
    return float((roi_a.values(image).mean() - roi_b.values(image).mean()) / sigma)


@dataclass(frozen=True)
class CannyParams:
    low: float = 0.1
    high: float = 0.25
    sigma: float = 1.4

    def __post_init__(self):
        if not 0 < self.low < self.high:
            raise ValueError("need 0 < low < high")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def canny_edges(
    image: np.ndarray, low: float = 0.1, high: float = 0.25, sigma: float = 1.4
) -> np.ndarray:
    """Standard Canny detector: Gaussian smoothing, Sobel gradients,
     4-direction non-maximum suppression, and double-threshold hysteresis.
    `low` and `high` are fractions of the maximum gradient magnitude."""
    CannyParams(low, high, sigma)  # validates
    image = np.asarray(image, dtype=float)
    smooth = ndimage.gaussian_filter(image, sigma)
    gx = ndimage.sobel(smooth, axis=1)
    gy = ndimage.sobel(smooth, axis=0)
    mag = np.hypot(gx, gy)
    if mag.max() == 0:
        return np.zeros(image.shape, dtype=bool)

    ang = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    padded = np.pad(mag, 1, mode="constant", constant_values=-np.inf)

    def neighbor(dy, dx):
        return padded[1 + dy : 1 + dy + mag.shape[0], 1 + dx : 1 + dx + mag.shape[1]]

    sector0 = (ang < 22.5) | (ang >= 157.5)
    sector45 = (ang >= 22.5) & (ang < 67.5)
    sector90 = (ang >= 67.5) & (ang < 112.5)
    sector135 = (ang >= 112.5) & (ang < 157.5)

    keep = np.zeros(mag.shape, dtype=bool)
    keep |= sector0 & (mag >= neighbor(0, 1)) & (mag >= neighbor(0, -1))
    keep |= sector45 & (mag >= neighbor(1, 1)) & (mag >= neighbor(-1, -1))
    keep |= sector90 & (mag >= neighbor(1, 0)) & (mag >= neighbor(-1, 0))
    keep |= sector135 & (mag >= neighbor(-1, 1)) & (mag >= neighbor(1, -1))
    nms = np.where(keep, mag, 0.0)

    hi = high * mag.max()
    lo = low * mag.max()
    strong = nms >= hi
    weak = nms >= lo
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return np.zeros(image.shape, dtype=bool)
    strong_labels = np.unique(labels[strong])
    strong_labels = strong_labels[strong_labels > 0]
    return np.isin(labels, strong_labels)


def edge_error_percent(
    recon: np.ndarray, reference: np.ndarray, params: CannyParams = CannyParams()
) -> float:
    """100 * |edges(recon) XOR edges(reference)| / max(1, |edges(reference)|)."""
    recon = np.asarray(recon, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if recon.shape != reference.shape:
        raise ValueError("images must share one shape")
    e_rec = canny_edges(recon, params.low, params.high, params.sigma)
    e_ref = canny_edges(reference, params.low, params.high, params.sigma)
    return 100.0 * np.count_nonzero(e_rec ^ e_ref) / max(1, np.count_nonzero(e_ref))


def rmse(a: np.ndarray, b: np.ndarray, normalize: bool = False) -> float:
    """Root-mean-square difference; optionally divided by the RMS of b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("arrays must share one shape")
    value = np.sqrt(np.mean((a - b) ** 2))
    if normalize:
        scale = np.sqrt(np.mean(b * b))
        if scale == 0:
            raise ValueError("cannot normalize by an all-zero reference")
        value /= scale
    return float(value)


def read_roi_file(path) -> dict[str, RoiSpec]:
    """Parse 'label row col' triples (one per line; blank lines and
    #-comments ignored) into ROIs grouped by label."""
    groups: dict[str, list] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'label row col'")
        label, row, col = parts[0], int(parts[1]), int(parts[2])
        groups.setdefault(label, []).append((row, col))
    return {label: RoiSpec.from_pixels(label, pix) for label, pix in groups.items()}


def write_roi_file(path, rois) -> None:
    lines = []
    for roi in rois:
        for r, c in roi.pixels:
            lines.append(f"{roi.label} {r} {c}")
    Path(path).write_text("\n".join(lines) + "\n")


def default_rois(n: int) -> dict[str, RoiSpec]:
    """Phantom-geometry ROIs: gray matter vs white matter contrast with a
    background-corner noise patch, all eroded away from tissue edges."""
    from pfkex.phantom import GM, WM, brain_phantom

    tis = brain_phantom(n)
    out = {}
    for label, code in (("gm", GM), ("wm", WM)):
        region = ndimage.binary_erosion(tis.labels == code, iterations=max(2, n // 32))
        rows, cols = np.nonzero(region)
        if len(rows) == 0:
            raise ValueError(f"phantom too small for a '{label}' ROI")
        out[label] = RoiSpec.from_pixels(label, list(zip(rows, cols)))
    size = max(4, n // 10)
    off = max(2, n // 32)
    pix = [(r, c) for r in range(off, off + size) for c in range(off, off + size)]
    out["noise"] = RoiSpec.from_pixels("noise", pix)
    return out
