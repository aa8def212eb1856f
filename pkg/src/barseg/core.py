"""Domain types shared by every stage of the pipeline.

Bars are the temporal unit everywhere: downbeat-delimited intervals of a
track. A track with B bars yields feature matrices with B rows, a B x B
self-similarity matrix, and segmentations expressed as strictly increasing
bar indices from 0 to B.

All types are immutable after construction (arrays are marked read-only),
so they can be shared freely across parallel workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

# Audio before the first downbeat gets its own leading bar only when it is
# longer than this; shorter gaps are pickup noise.
LEADING_BAR_THRESHOLD = 0.5

# Slack allowed between the last bar end and the nominal track duration.
END_SLACK = 1e-6

SIMILARITY_KINDS = ("rbf", "cosine", "lsd_affinity")


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BarGrid:
    """Downbeat-delimited bar intervals of one track.

    ``bar_starts`` has length B + 1: entry i is the start of bar i in
    seconds, and the final entry closes the last bar.
    """

    bar_starts: np.ndarray
    track_duration: float

    def __post_init__(self):
        starts = _frozen_array(self.bar_starts)
        if starts.ndim != 1 or len(starts) < 2:
            raise InvalidInput("bar_starts needs at least one bar (length >= 2)")
        if np.any(np.diff(starts) <= 0):
            raise InvalidInput("bar_starts must be strictly increasing")
        if starts[0] < 0:
            raise InvalidInput("bar_starts must not start before 0")
        if starts[-1] > self.track_duration + END_SLACK:
            raise InvalidInput(
                f"last bar ends at {starts[-1]:.6f}s, beyond track duration "
                f"{self.track_duration:.6f}s"
            )
        object.__setattr__(self, "bar_starts", starts)
        object.__setattr__(self, "track_duration", float(self.track_duration))

    @property
    def num_bars(self) -> int:
        return len(self.bar_starts) - 1

    def bar_interval(self, i: int) -> tuple[float, float]:
        return float(self.bar_starts[i]), float(self.bar_starts[i + 1])


@dataclass(frozen=True)
class BarMatrix:
    """B x D feature matrix, one row per bar."""

    values: np.ndarray
    feature_id: str

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidInput("BarMatrix values must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(values)):
            raise InvalidInput("BarMatrix values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def num_bars(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class SelfSimilarityMatrix:
    """B x B symmetric similarity matrix between all bars of a track."""

    values: np.ndarray
    similarity_kind: str

    def __post_init__(self):
        if self.similarity_kind not in SIMILARITY_KINDS:
            raise InvalidInput(f"unknown similarity kind {self.similarity_kind!r}")
        values = _frozen_array(self.values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InvalidInput("similarity matrix must be square")
        if not np.all(np.isfinite(values)):
            raise InvalidInput("similarity matrix must be finite")
        if np.max(np.abs(values - values.T)) > 1e-9:
            raise InvalidInput("similarity matrix must be symmetric")
        if self.similarity_kind in ("rbf", "cosine"):
            if np.max(np.abs(np.diag(values) - 1.0)) > 1e-9:
                raise InvalidInput("similarity diagonal must equal 1")
            lo = -1.0 if self.similarity_kind == "cosine" else 0.0
            if values.min() < lo - 1e-9 or values.max() > 1.0 + 1e-9:
                raise InvalidInput(
                    f"{self.similarity_kind} similarities must lie in [{lo}, 1]"
                )
        else:  # affinity graphs carry weights on a zero diagonal
            if values.min() < -1e-12:
                raise InvalidInput("affinity weights must be non-negative")
            if np.max(np.abs(np.diag(values))) > 1e-12:
                raise InvalidInput("affinity diagonal must be zero")
        object.__setattr__(self, "values", values)

    @property
    def num_bars(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Segmentation:
    """Boundary list in bar indices, optionally projected to seconds.

    Always starts at 0 and ends at B. Segmenters produce the bar indices;
    ``with_seconds`` attaches the projection through a BarGrid.
    """

    boundaries_bars: np.ndarray
    boundaries_seconds: np.ndarray | None = field(default=None)

    def __post_init__(self):
        bars = _frozen_array(self.boundaries_bars, dtype=np.int64)
        if bars.ndim != 1 or len(bars) < 2:
            raise InvalidInput("a segmentation needs at least the two end boundaries")
        if bars[0] != 0:
            raise InvalidInput("boundaries must start at bar 0")
        if np.any(np.diff(bars) <= 0):
            raise InvalidInput("bar boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries_bars", bars)
        if self.boundaries_seconds is not None:
            secs = _frozen_array(self.boundaries_seconds)
            if len(secs) != len(bars):
                raise InvalidInput("seconds projection must match boundary count")
            object.__setattr__(self, "boundaries_seconds", secs)

    @property
    def num_bars(self) -> int:
        return int(self.boundaries_bars[-1])

    @property
    def num_segments(self) -> int:
        return len(self.boundaries_bars) - 1

    def with_seconds(self, grid: BarGrid) -> "Segmentation":
        return Segmentation(self.boundaries_bars, boundaries_to_seconds(self, grid))


@dataclass(frozen=True)
class Annotation:
    """Reference segmentation: contiguous (start, end, label) spans."""

    segments: tuple

    # real annotation files carry rounding gaps up to this size
    CONTIGUITY_TOL = 0.010

    def __post_init__(self):
        segs = tuple(
            (float(s), float(e), str(label)) for s, e, label in self.segments
        )
        if not segs:
            raise InvalidInput("annotation has no segments")
        if segs[0][0] < 0:
            raise InvalidInput("first segment must not start before 0")
        prev_end = None
        for start, end, _ in segs:
            if end <= start:
                raise InvalidInput("segment ends must strictly increase")
            if prev_end is not None:
                if abs(start - prev_end) > self.CONTIGUITY_TOL:
                    raise InvalidInput(
                        f"segments not contiguous: gap of {start - prev_end:.4f}s"
                    )
                if end <= prev_end:
                    raise InvalidInput("segment ends must strictly increase")
            prev_end = end
        object.__setattr__(self, "segments", segs)

    def boundaries(self) -> list[float]:
        """Segment start times plus the final end time."""
        return [s for s, _, _ in self.segments] + [self.segments[-1][1]]

    @property
    def extent(self) -> tuple[float, float]:
        return self.segments[0][0], self.segments[-1][1]


def bars_from_downbeats(downbeats, track_duration: float) -> BarGrid:
    """Build a bar grid from estimated downbeat times.

    The grid is the downbeats themselves, closed by a final entry at
    ``min(track_duration, last downbeat + median inter-downbeat interval)``.
    A leading partial bar covering [0, first downbeat) is prepended only
    when the first downbeat comes later than 0.5 s.
    """
    downbeats = np.asarray(downbeats, dtype=np.float64)
    if downbeats.ndim != 1 or len(downbeats) == 0:
        raise InvalidInput("downbeat list is empty")
    if np.any(np.diff(downbeats) <= 0):
        raise InvalidInput("downbeats must be strictly increasing")
    if downbeats[0] < 0 or downbeats[-1] > track_duration:
        raise InvalidInput("downbeats must lie within [0, track_duration]")

    if len(downbeats) >= 2:
        median_bar = float(np.median(np.diff(downbeats)))
        end = min(float(track_duration), float(downbeats[-1]) + median_bar)
    else:
        end = float(track_duration)
    if end <= downbeats[-1]:
        raise InvalidInput(
            "no room to close the final bar: last downbeat coincides with track end"
        )

    starts = list(downbeats)
    if downbeats[0] > LEADING_BAR_THRESHOLD:
        starts = [0.0] + starts
    starts.append(end)
    return BarGrid(np.asarray(starts), track_duration)


def boundaries_to_seconds(seg: Segmentation, grid: BarGrid) -> np.ndarray:
    """Project bar-index boundaries to seconds by lookup into the grid."""
    bars = seg.boundaries_bars
    if bars[-1] > grid.num_bars:
        raise InvalidInput(
            f"boundary bar {int(bars[-1])} out of range for a {grid.num_bars}-bar grid"
        )
    return grid.bar_starts[bars]
