"""Novelty-based boundary detection with a tapered checkerboard kernel.

A signed 2M x 2M kernel is correlated along the main diagonal of the SSM;
peaks of the resulting novelty curve that clear an adaptive (median
filtered) threshold become boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .core import Segmentation, SelfSimilarityMatrix
from .errors import InvalidInput

DEFAULT_TAPER_SIGMA = 0.5


@dataclass(frozen=True)
class FooteParams:
    kernel_size: int = 12  # half-width M; the full kernel is 2M x 2M
    median_size: int = 12
    taper_sigma: float = DEFAULT_TAPER_SIGMA

    def __post_init__(self):
        if self.kernel_size < 1:
            raise InvalidInput("kernel_size must be >= 1")
        if self.median_size < 1:
            raise InvalidInput("median_size must be >= 1")
        if self.taper_sigma <= 0:
            raise InvalidInput("taper_sigma must be positive")


def checkerboard_kernel(half_width: int, taper_sigma: float = DEFAULT_TAPER_SIGMA) -> np.ndarray:
    """Signed checkerboard of size 2M x 2M under a radial Gaussian taper.

    Same-side quadrants are +1, cross quadrants -1, each weighted by
    exp(-((p - M + 0.5)^2 + (q - M + 0.5)^2) / (2 (sigma M)^2)). The signed
    entries sum to zero by quadrant symmetry.
    """
    if half_width < 1:
        raise InvalidInput("kernel half-width must be >= 1")
    m = half_width
    offsets = np.arange(2 * m) - m + 0.5
    radial = offsets[:, None] ** 2 + offsets[None, :] ** 2
    taper = np.exp(-radial / (2.0 * (taper_sigma * m) ** 2))
    sign = np.where(
        (offsets[:, None] < 0) == (offsets[None, :] < 0), 1.0, -1.0
    )
    return sign * taper


def novelty_curve(S: SelfSimilarityMatrix | np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Correlate the kernel along the SSM diagonal; one value per bar.

    The SSM is edge-padded by replicating border rows/columns so the curve
    is defined at every bar. Negative responses are clipped to 0.
    """
    values = S.values if isinstance(S, SelfSimilarityMatrix) else np.asarray(S, float)
    m = kernel.shape[0] // 2
    padded = np.pad(values, m, mode="edge")
    curve = _accel.novelty(padded, np.ascontiguousarray(kernel, dtype=np.float64))
    return np.maximum(curve, 0.0)


def median_filter(x: np.ndarray, size: int) -> np.ndarray:
    """Centered running median; windows shrink at the edges.

    The window at t spans [t - size//2, t + (size-1)//2], symmetric for odd
    sizes and heavier to the left by one for even sizes.
    """
    n = len(x)
    out = np.empty(n)
    lo_half = size // 2
    hi_half = (size - 1) // 2
    for t in range(n):
        lo = max(0, t - lo_half)
        hi = min(n, t + hi_half + 1)
        out[t] = np.median(x[lo:hi])
    return out


def pick_peaks(novelty: np.ndarray, median_size: int) -> Segmentation:
    """Local maxima strictly above their median-filtered threshold.

    A bar t is a boundary when n[t] > n[t-1], n[t] >= n[t+1] (first index
    of a plateau wins) and n[t] > median threshold. The track start and end
    are always boundaries.
    """
    n = np.asarray(novelty, dtype=np.float64)
    n_bars = len(n)
    threshold = median_filter(n, median_size)
    bounds = {0, n_bars}
    for t in range(1, n_bars - 1):
        if n[t] > n[t - 1] and n[t] >= n[t + 1] and n[t] > threshold[t]:
            bounds.add(t)
    return Segmentation(np.asarray(sorted(bounds), dtype=np.int64))


def segment_foote(S: SelfSimilarityMatrix, params: FooteParams = FooteParams()) -> Segmentation:
    """Checkerboard novelty -> median-thresholded peaks -> boundaries."""
    kernel = checkerboard_kernel(params.kernel_size, params.taper_sigma)
    curve = novelty_curve(S, kernel)
    return pick_peaks(curve, params.median_size)
