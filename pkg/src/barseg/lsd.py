"""Spectral-clustering segmentation on a stripe-emphasizing affinity graph.

The affinity combines a mutual-kNN recurrence graph (long-range repetition
links) with a local path graph (adjacent-bar links); boundaries fall where
the k-means labels of the normalized-Laplacian embedding change.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BarMatrix, Segmentation, SelfSimilarityMatrix
from .errors import InvalidInput
from .ssm import pairwise_sq_dists

log = logging.getLogger(__name__)

DEFAULT_MU = 0.5
KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class LsdParams:
    k: int = 8
    knn: int | None = None  # default: ceil(1 + 2 log2 B), clamped below B
    mu: float = DEFAULT_MU
    median_size: int | None = None  # default: equal to k
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput("cluster count k must be >= 1")
        if self.knn is not None and self.knn < 1:
            raise InvalidInput("knn must be >= 1")
        if not 0.0 <= self.mu <= 1.0:
            raise InvalidInput("mu must lie in [0, 1]")


def default_knn(n_bars: int) -> int:
    return int(np.ceil(1 + 2 * np.log2(n_bars)))


def build_affinity(X: BarMatrix, knn: int | None = None, mu: float = DEFAULT_MU) -> SelfSimilarityMatrix:
    """Mutual-kNN recurrence links blended with a local path graph.

    Recurrence links exist where i and j are each among the other's knn
    nearest rows; both link families are Gaussian-weighted with a median
    heuristic bandwidth over their own distances.
    """
    n_bars = X.num_bars
    if n_bars < 3:
        raise InvalidInput("affinity needs at least 3 bars")
    if knn is None:
        knn = default_knn(n_bars)
    knn = min(max(1, knn), n_bars - 1)

    dsq = pairwise_sq_dists(X.values)
    dist = np.sqrt(dsq)

    # neighbors = rows within the knn-th smallest distance; distance ties
    # are all included so the graph is independent of row order
    neighbor = np.zeros((n_bars, n_bars), dtype=bool)
    for i in range(n_bars):
        others = np.delete(dist[i], i)
        threshold = np.partition(others, knn - 1)[knn - 1]
        neighbor[i] = dist[i] <= threshold
        neighbor[i, i] = False
    mutual = neighbor & neighbor.T

    recurrence = np.zeros((n_bars, n_bars))
    iu, ju = np.nonzero(np.triu(mutual, k=1))
    if len(iu):
        sigma = float(np.median(dist[iu, ju]))
        weights = np.ones(len(iu)) if sigma == 0.0 else np.exp(
            -dsq[iu, ju] / (2.0 * sigma * sigma)
        )
        recurrence[iu, ju] = weights
        recurrence[ju, iu] = weights

    adjacent = dist[np.arange(n_bars - 1), np.arange(1, n_bars)]
    sigma_loc = float(np.median(adjacent))
    local_w = np.ones(n_bars - 1) if sigma_loc == 0.0 else np.exp(
        -adjacent**2 / (2.0 * sigma_loc * sigma_loc)
    )
    path = np.zeros((n_bars, n_bars))
    path[np.arange(n_bars - 1), np.arange(1, n_bars)] = local_w
    path[np.arange(1, n_bars), np.arange(n_bars - 1)] = local_w

    A = mu * recurrence + (1.0 - mu) * path
    A = 0.5 * (A + A.T)
    np.fill_diagonal(A, 0.0)
    return SelfSimilarityMatrix(A, "lsd_affinity")


def laplacian_embedding(A: SelfSimilarityMatrix | np.ndarray, k: int) -> np.ndarray:
    """Rows of the k bottom eigenvectors of the symmetric normalized Laplacian.

    Each eigenvector is sign-fixed (largest-magnitude entry positive) and
    the embedding rows are scaled to unit norm; exact-zero rows stay zero.
    """
    values = A.values if isinstance(A, SelfSimilarityMatrix) else np.asarray(A, float)
    n = values.shape[0]
    if k > n:
        raise InvalidInput(f"k={k} exceeds the number of bars ({n})")

    deg = values.sum(axis=1)
    with np.errstate(divide="ignore"):
        dinv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    lap = np.eye(n) - dinv_sqrt[:, None] * values * dinv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)

    _, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, k - 1])
    for col in range(vecs.shape[1]):
        peak = np.argmax(np.abs(vecs[:, col]))
        if vecs[peak, col] < 0:
            vecs[:, col] = -vecs[:, col]

    norms = np.linalg.norm(vecs, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    return vecs / safe[:, None]


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = np.sum((X - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centers[c] = X[idx]
        closest = np.minimum(closest, np.sum((X - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int) -> tuple[np.ndarray, float]:
    k = centers.shape[0]
    labels = np.full(X.shape[0], -1)
    for _ in range(max_iter):
        dists = pairwise_to_centers(X, centers)
        new_labels = np.argmin(dists, axis=1)
        for c in range(k):  # revive empty clusters from the worst-served point
            if not np.any(new_labels == c):
                worst = int(np.argmax(dists[np.arange(len(X)), new_labels]))
                centers[c] = X[worst]
                new_labels[worst] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = X[labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)
    dists = pairwise_to_centers(X, centers)
    inertia = float(dists[np.arange(len(X)), labels].sum())
    return labels, inertia


def pairwise_to_centers(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (
        np.sum(X**2, axis=1)[:, None]
        + np.sum(centers**2, axis=1)[None, :]
        - 2.0 * X @ centers.T
    )
    return np.maximum(d, 0.0)


def kmeans_labels(
    X: np.ndarray,
    k: int,
    seed: int = 0,
    restarts: int = KMEANS_RESTARTS,
    max_iter: int = KMEANS_MAX_ITER,
) -> np.ndarray:
    """Deterministic k-means: k-means++ inits from a fixed seed, best inertia."""
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeans_pp_init(X, k, rng)
        labels, inertia = _lloyd(X, centers.copy(), max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def mode_filter(labels: np.ndarray, size: int) -> np.ndarray:
    """Majority vote in a centered window; ties keep the incumbent label.

    Windows span [t - size//2, t + (size-1)//2] and shrink at the edges.
    The output label always occurs inside the window.
    """
    labels = np.asarray(labels)
    n = len(labels)
    out = labels.copy()
    lo_half = size // 2
    hi_half = (size - 1) // 2
    for t in range(n):
        window = labels[max(0, t - lo_half) : min(n, t + hi_half + 1)]
        counts = np.bincount(window)
        best = counts.max()
        tied = np.nonzero(counts == best)[0]
        out[t] = labels[t] if labels[t] in tied else tied[0]
    return out


def segment_lsd(X: BarMatrix, params: LsdParams = LsdParams()) -> Segmentation:
    """Affinity -> Laplacian embedding -> k-means -> label change points.

    Tracks shorter than the cluster count (or too short for an affinity
    graph) degrade to the trivial [0, B] segmentation with a warning
    instead of aborting a sweep.
    """
    n_bars = X.num_bars
    if n_bars < max(params.k, 3):
        log.warning(
            "segment_lsd: track of %d bars too short for k=%d; returning [0, B]",
            n_bars,
            params.k,
        )
        return Segmentation(np.asarray([0, n_bars], dtype=np.int64))
    if pairwise_sq_dists(X.values).max() == 0.0:  # one effective cluster
        return Segmentation(np.asarray([0, n_bars], dtype=np.int64))

    affinity = build_affinity(X, knn=params.knn, mu=params.mu)
    embedding = laplacian_embedding(affinity, params.k)
    labels = kmeans_labels(embedding, params.k, seed=params.seed)
    labels = mode_filter(labels, params.median_size or params.k)

    changes = 1 + np.nonzero(labels[1:] != labels[:-1])[0]
    bounds = np.concatenate(([0], changes, [n_bars]))
    return Segmentation(np.unique(bounds).astype(np.int64))
