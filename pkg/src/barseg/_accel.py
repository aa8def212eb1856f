"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The novelty correlation (Foote) and the block-matching dynamic program
(CBM) dominate sweep runtime, so both carry an ``@njit`` version and an
equivalent numpy one. Selection: numba when importable, unless the
``BARSEG_NUMBA`` environment variable is set to ``0`` (force numpy) or
``1`` (require numba). ``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("BARSEG_NUMBA", "auto").strip().lower()

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

if _env in ("0", "false", "off", "no"):
    USING_NUMBA = False
elif _env in ("1", "true", "on", "yes"):
    if not HAVE_NUMBA:
        raise ImportError("BARSEG_NUMBA=1 but numba is not importable")
    USING_NUMBA = True
else:
    USING_NUMBA = HAVE_NUMBA


# ---------------------------------------------------------------------------
# Foote novelty: correlate a signed kernel along the padded SSM diagonal.

def novelty_numpy(S_pad: np.ndarray, K: np.ndarray) -> np.ndarray:
    w = K.shape[0]
    n_bars = S_pad.shape[0] - w
    out = np.empty(n_bars)
    for t in range(n_bars):
        out[t] = np.sum(K * S_pad[t : t + w, t : t + w])
    return out


def _novelty_loops(S_pad, K):  # pragma: no cover - numba-compiled body
    w = K.shape[0]
    n_bars = S_pad.shape[0] - w
    out = np.empty(n_bars)
    for t in range(n_bars):
        acc = 0.0
        for p in range(w):
            for q in range(w):
                acc += K[p, q] * S_pad[t + p, t + q]
        out[t] = acc
    return out


novelty_numba = njit(cache=True)(_novelty_loops) if HAVE_NUMBA else None
novelty = novelty_numba if USING_NUMBA else novelty_numpy


# ---------------------------------------------------------------------------
# CBM dynamic program over prefix-sum block scores.
#
# Prefix tables make every block score O(1):
#   P[a, b]      = sum of S[:a, :b]
#   Dg[a]        = sum of the first a diagonal entries
#   U[d-1, t]    = sum over s < t of S[s, s + d]   (d = 1..band)
#   L[d-1, t]    = sum over s < t of S[s + d, s]
# Full-kernel score of [i, j):   (square block sum - diagonal) / n
# Band-kernel score of [i, j):   sum of the 2*band clipped diagonals / n

def cbm_prefix_tables(S: np.ndarray, band: int):
    n = S.shape[0]
    P = np.zeros((n + 1, n + 1))
    P[1:, 1:] = S.cumsum(axis=0).cumsum(axis=1)
    Dg = np.zeros(n + 1)
    Dg[1:] = np.cumsum(np.diag(S))
    if band > 0:
        U = np.zeros((band, n))
        L = np.zeros((band, n))
        for d in range(1, band + 1):
            if d < n:
                U[d - 1, 1 : n - d + 1] = np.cumsum(np.diag(S, k=d))
                L[d - 1, 1 : n - d + 1] = np.cumsum(np.diag(S, k=-d))
    else:
        U = np.zeros((1, 1))
        L = np.zeros((1, 1))
    return P, Dg, U, L


def _dp_body(P, Dg, U, L, n_bars, max_size, band):
    NEG = -1e300
    c = np.full(n_bars + 1, NEG)
    c[0] = 0.0
    nseg = np.zeros(n_bars + 1, np.int64)
    parent = np.full(n_bars + 1, -1, np.int64)
    for j in range(1, n_bars + 1):
        lo = j - max_size
        if lo < 0:
            lo = 0
        best = NEG
        best_n = np.int64(2**62)
        best_i = -1
        for i in range(lo, j):
            n = j - i
            if band == 0:
                block = P[j, j] - P[i, j] - P[j, i] + P[i, i]
                score = (block - (Dg[j] - Dg[i])) / n
            else:
                acc = 0.0
                dmax = band if band < n - 1 else n - 1
                for d in range(1, dmax + 1):
                    acc += U[d - 1, j - d] - U[d - 1, i]
                    acc += L[d - 1, j - d] - L[d - 1, i]
                score = acc / n
            v = c[i] + score
            cand_n = nseg[i] + 1
            # ties: fewest segments, then earliest i (longest last segment)
            if v > best or (v == best and cand_n < best_n):
                best = v
                best_n = cand_n
                best_i = i
        c[j] = best
        nseg[j] = best_n
        parent[j] = best_i
    return c, parent


cbm_dp_numpy = _dp_body
cbm_dp_numba = njit(cache=True)(_dp_body) if HAVE_NUMBA else None
cbm_dp = cbm_dp_numba if USING_NUMBA else cbm_dp_numpy


def warmup() -> None:
    """Trigger JIT compilation of the numba kernels on tiny inputs."""
    if not HAVE_NUMBA:
        return
    S = np.eye(4)
    K = np.ones((2, 2))
    novelty_numba(np.pad(S, 1, mode="edge"), K)
    P, Dg, U, L = cbm_prefix_tables(S, 0)
    cbm_dp_numba(P, Dg, U, L, 4, 4, 0)
    P, Dg, U, L = cbm_prefix_tables(S, 7)
    cbm_dp_numba(P, Dg, U, L, 4, 4, 7)
