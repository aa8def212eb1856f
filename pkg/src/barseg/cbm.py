"""Correlation block-matching: dynamic programming over block scores.

Each candidate segment [i, j) is scored by correlating a kernel with the
S[i:j, i:j] sub-block and normalizing by the segment length; the DP picks
the boundary set maximizing the summed score. The size penalty of the
original formulation is deliberately absent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .core import Segmentation, SelfSimilarityMatrix
from .errors import InvalidInput

KERNEL_KINDS = ("full", "band7")
BAND_WIDTH = 7
DEFAULT_MAX_SIZE = 32


@dataclass(frozen=True)
class CbmParams:
    kernel: str = "full"
    max_size: int = DEFAULT_MAX_SIZE

    def __post_init__(self):
        if self.kernel not in KERNEL_KINDS:
            raise InvalidInput(f"kernel must be one of {KERNEL_KINDS}")
        if self.max_size < 1:
            raise InvalidInput("max_size must be >= 1")


def cbm_kernel(n: int, kind: str) -> np.ndarray:
    """Kernel for an n-bar block: all off-diagonal ones ("full") or only
    the 7 nearest off-diagonals ("band7"). n = 1 gives the 1x1 zero matrix."""
    if n < 1:
        raise InvalidInput("kernel size must be >= 1")
    if kind not in KERNEL_KINDS:
        raise InvalidInput(f"kernel must be one of {KERNEL_KINDS}")
    offsets = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    if kind == "full":
        return (offsets >= 1).astype(np.float64)
    return ((offsets >= 1) & (offsets <= BAND_WIDTH)).astype(np.float64)


def block_score(S: SelfSimilarityMatrix | np.ndarray, i: int, j: int, kind: str) -> float:
    """Kernel-weighted sum over S[i:j, i:j], normalized by the length j - i."""
    values = S.values if isinstance(S, SelfSimilarityMatrix) else np.asarray(S, float)
    if not 0 <= i < j <= values.shape[0]:
        raise InvalidInput(f"need 0 <= i < j <= B, got i={i}, j={j}")
    n = j - i
    return float(np.sum(cbm_kernel(n, kind) * values[i:j, i:j]) / n)


def segment_cbm(S: SelfSimilarityMatrix, params: CbmParams = CbmParams()) -> Segmentation:
    """Optimal boundaries by dynamic programming over block scores.

    c(j) = max over i in [j - max_size, j) of c(i) + score(i, j); ties go to
    the fewest segments, then the longest last segment. Backtracking from
    c(B) recovers the boundaries.
    """
    values = np.ascontiguousarray(S.values, dtype=np.float64)
    n_bars = values.shape[0]
    band = 0 if params.kernel == "full" else BAND_WIDTH
    tables = _accel.cbm_prefix_tables(values, band)
    _, parent = _accel.cbm_dp(*tables, n_bars, params.max_size, band)

    bounds = [n_bars]
    while bounds[-1] > 0:
        bounds.append(int(parent[bounds[-1]]))
    return Segmentation(np.asarray(bounds[::-1], dtype=np.int64))


def total_score(S, boundaries, kind: str) -> float:
    """Summed block score of a full segmentation (diagnostic helper)."""
    bounds = list(boundaries)
    return sum(block_score(S, i, j, kind) for i, j in zip(bounds[:-1], bounds[1:]))
