"""Self-similarity matrices from barwise feature matrices."""
from __future__ import annotations

import logging

import numpy as np

from .core import BarMatrix, SelfSimilarityMatrix
from .errors import InvalidInput

log = logging.getLogger(__name__)


def pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all rows, exactly symmetric."""
    sq = np.einsum("ij,ij->i", X, X)
    d = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    d = 0.5 * (d + d.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def median_pairwise_distance(X: np.ndarray) -> float:
    """Median heuristic bandwidth: median Euclidean distance over i < j."""
    d = np.sqrt(pairwise_sq_dists(X))
    iu = np.triu_indices(d.shape[0], k=1)
    return float(np.median(d[iu]))


def cosine_ssm(X: BarMatrix) -> SelfSimilarityMatrix:
    """Cosine similarity between all bar pairs; diagonal forced to 1.

    Zero-norm rows cannot define an angle: their similarities are set to 0
    (diagonal still 1) and a warning is recorded.
    """
    values = X.values
    norms = np.linalg.norm(values, axis=1)
    zero = norms == 0.0
    if zero.any():
        log.warning(
            "cosine_ssm: %d zero-norm row(s); their similarities are set to 0",
            int(zero.sum()),
        )
    safe = np.where(zero, 1.0, norms)
    unit = values / safe[:, None]
    S = unit @ unit.T
    S = 0.5 * (S + S.T)
    np.clip(S, -1.0, 1.0, out=S)
    S[zero, :] = 0.0
    S[:, zero] = 0.0
    np.fill_diagonal(S, 1.0)
    return SelfSimilarityMatrix(S, "cosine")


def rbf_ssm(X: BarMatrix, sigma: float | None = None) -> SelfSimilarityMatrix:
    """Gaussian similarity exp(-d^2 / (2 sigma^2)) with median-heuristic sigma.

    When every pair coincides (sigma = 0) the matrix is all ones. ``sigma``
    can be overridden for experiments.
    """
    if X.num_bars < 2:
        raise InvalidInput("rbf_ssm needs at least 2 bars")
    dsq = pairwise_sq_dists(X.values)
    if sigma is None:
        iu = np.triu_indices(dsq.shape[0], k=1)
        sigma = float(np.median(np.sqrt(dsq[iu])))
    if sigma == 0.0:
        S = np.ones_like(dsq)
    else:
        S = np.exp(-dsq / (2.0 * sigma * sigma))
    np.fill_diagonal(S, 1.0)
    return SelfSimilarityMatrix(S, "rbf")


def normalize_rows(X: BarMatrix) -> BarMatrix:
    """Scale each nonzero row to unit Euclidean norm; zero rows pass through."""
    values = X.values
    norms = np.linalg.norm(values, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    return BarMatrix(values / safe[:, None], feature_id=X.feature_id)


def build_ssm(X: BarMatrix, similarity: str) -> SelfSimilarityMatrix:
    """Dispatch on similarity kind ("rbf" or "cosine")."""
    if similarity == "rbf":
        return rbf_ssm(X)
    if similarity == "cosine":
        return cosine_ssm(X)
    raise InvalidInput(f"unknown similarity {similarity!r}")
