"""Boundary hit-rate metrics, trimming protocols, annotation selection.

Hits are counted by a maximum bipartite matching between reference and
estimated boundaries (each boundary used at most once), at 0.5 s and 3 s
tolerance windows. Trimming drops the track-start and track-end boundaries
of both lists; double trimming first strips annotated silent extremity
segments and clips estimates to the remaining active interval.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Annotation
from .errors import EmptyAnnotation, InvalidInput

TOLERANCES = (0.5, 3.0)
TRIMMINGS = ("none", "trim", "double_trim")
DEFAULT_SILENCE_LABELS = frozenset({"silence", "silent", "end", "z"})


@dataclass(frozen=True)
class DetectionScore:
    precision: float
    recall: float
    f_measure: float
    tolerance: float
    trimming: str


@dataclass(frozen=True)
class TrackEval:
    """Scores of one track at every (tolerance, trimming) cell."""

    track_id: str
    scores: dict = field(default_factory=dict)  # (tolerance, trimming) -> DetectionScore
    chosen_annotation: dict = field(default_factory=dict)  # same keys -> ref index


def match_boundaries(ref, est, window: float) -> int:
    """Maximum one-to-one matching size under |r - e| <= window.

    Classic augmenting-path matching; the candidate estimates for each
    reference boundary form a contiguous run because both lists are sorted.
    """
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if len(ref) == 0 or len(est) == 0:
        return 0

    lo = np.searchsorted(est, ref - window, side="left")
    hi = np.searchsorted(est, ref + window, side="right")

    owner = np.full(len(est), -1, dtype=np.int64)

    def augment(i: int, visited) -> bool:
        for j in range(lo[i], hi[i]):
            if not visited[j]:
                visited[j] = True
                if owner[j] < 0 or augment(owner[j], visited):
                    owner[j] = i
                    return True
        return False

    hits = 0
    for i in range(len(ref)):
        if augment(i, np.zeros(len(est), dtype=bool)):
            hits += 1
    return hits


def detection_score(ref, est, window: float, trimming: str = "none") -> DetectionScore:
    """Precision/recall/F of the maximum matching; empty lists score 0."""
    hits = match_boundaries(ref, est, window)
    precision = hits / len(est) if len(est) else 0.0
    recall = hits / len(ref) if len(ref) else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return DetectionScore(precision, recall, f, tolerance=window, trimming=trimming)


def trim(boundaries, count: int = 1) -> list[float]:
    """Drop the track-start and track-end boundaries before scoring.

    ``count`` boundaries are removed at each extremity (one by default,
    the community convention).
    """
    boundaries = list(boundaries)
    if len(boundaries) < 2 * count:
        return []
    return boundaries[count : len(boundaries) - count]


def double_trim(ann: Annotation, silence_labels=DEFAULT_SILENCE_LABELS) -> Annotation:
    """Strip annotated silent segments from both extremities."""
    labels = {label.lower() for label in silence_labels}
    segments = list(ann.segments)
    while segments and segments[0][2].lower() in labels:
        segments.pop(0)
    while segments and segments[-1][2].lower() in labels:
        segments.pop()
    if not segments:
        raise EmptyAnnotation("every segment is silent; nothing to score")
    return Annotation(tuple(segments))


def clip_boundaries(boundaries, lo: float, hi: float) -> list[float]:
    """Clamp boundaries into [lo, hi] and drop the resulting duplicates."""
    clamped = np.clip(np.asarray(boundaries, dtype=np.float64), lo, hi)
    return list(np.unique(clamped))


def prepare_boundaries(
    ann: Annotation,
    est,
    trimming: str,
    silence_labels=DEFAULT_SILENCE_LABELS,
    trim_count: int = 1,
) -> tuple[list[float], list[float]]:
    """Apply a trimming protocol to one (reference, estimate) pair."""
    est = list(est)
    if trimming == "none":
        return ann.boundaries(), est
    if trimming == "trim":
        return trim(ann.boundaries(), trim_count), trim(est, trim_count)
    if trimming == "double_trim":
        active = double_trim(ann, silence_labels)
        lo, hi = active.extent
        return (
            trim(active.boundaries(), trim_count),
            trim(clip_boundaries(est, lo, hi), trim_count),
        )
    raise InvalidInput(f"unknown trimming mode {trimming!r}")


def best_of_annotations(
    refs,
    est,
    window: float,
    trimming: str = "none",
    silence_labels=DEFAULT_SILENCE_LABELS,
    trim_count: int = 1,
) -> tuple[DetectionScore, int]:
    """Score against every reference; keep the best F (ties: lowest index)."""
    refs = list(refs)
    if not refs:
        raise InvalidInput("need at least one reference annotation")
    best, best_idx = None, 0
    for idx, ann in enumerate(refs):
        ref_b, est_b = prepare_boundaries(ann, est, trimming, silence_labels, trim_count)
        score = detection_score(ref_b, est_b, window, trimming)
        if best is None or score.f_measure > best.f_measure:
            best, best_idx = score, idx
    return best, best_idx


def evaluate_track(
    track_id: str,
    refs,
    est,
    tolerances=TOLERANCES,
    trimmings=("none",),
    silence_labels=DEFAULT_SILENCE_LABELS,
    trim_count: int = 1,
) -> TrackEval:
    """Best-of-annotations scores for every (tolerance, trimming) cell."""
    scores = {}
    chosen = {}
    for trimming in trimmings:
        for tol in tolerances:
            score, idx = best_of_annotations(
                refs, est, tol, trimming, silence_labels, trim_count
            )
            scores[(tol, trimming)] = score
            chosen[(tol, trimming)] = idx
    return TrackEval(track_id=track_id, scores=scores, chosen_annotation=chosen)
