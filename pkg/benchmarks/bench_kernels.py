#!/usr/bin/env python3
"""Benchmark the numba-compiled hot kernels against the numpy fallbacks.

Runs the Foote novelty correlation and the CBM dynamic program on random
SSMs of increasing size and prints per-call timings for both backends.

    python benchmarks/bench_kernels.py [--sizes 200,500,1000] [--repeats 5]
"""
import argparse
import time

import numpy as np

from barseg import _accel
from barseg.foote import checkerboard_kernel


def random_ssm(rng, n):
    S = rng.uniform(0.0, 1.0, size=(n, n))
    S = 0.5 * (S + S.T)
    np.fill_diagonal(S, 1.0)
    return S


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_novelty(S, m, repeats):
    K = checkerboard_kernel(m)
    padded = np.pad(S, m, mode="edge")
    rows = {"numpy": time_call(lambda: _accel.novelty_numpy(padded, K), repeats)}
    if _accel.HAVE_NUMBA:
        _accel.novelty_numba(padded, K)  # compile outside the timer
        rows["numba"] = time_call(lambda: _accel.novelty_numba(padded, K), repeats)
        a = _accel.novelty_numpy(padded, K)
        b = _accel.novelty_numba(padded, K)
        assert np.allclose(a, b, atol=1e-9)
    return rows


def bench_cbm(S, band, max_size, repeats):
    n = S.shape[0]
    tables = _accel.cbm_prefix_tables(S, band)
    rows = {
        "numpy": time_call(lambda: _accel.cbm_dp_numpy(*tables, n, max_size, band), repeats)
    }
    if _accel.HAVE_NUMBA:
        _accel.cbm_dp_numba(*tables, n, max_size, band)
        rows["numba"] = time_call(
            lambda: _accel.cbm_dp_numba(*tables, n, max_size, band), repeats
        )
        _, p_np = _accel.cbm_dp_numpy(*tables, n, max_size, band)
        _, p_nb = _accel.cbm_dp_numba(*tables, n, max_size, band)
        assert np.array_equal(p_np, p_nb)
    return rows


def fmt(rows):
    out = f"numpy {rows['numpy'] * 1e3:9.2f} ms"
    if "numba" in rows:
        speedup = rows["numpy"] / rows["numba"]
        out += f" | numba {rows['numba'] * 1e3:9.2f} ms | x{speedup:.1f}"
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"numba available: {_accel.HAVE_NUMBA} (selected: {_accel.USING_NUMBA})")
    rng = np.random.default_rng(0)
    for n in sizes:
        S = random_ssm(rng, n)
        print(f"\nB = {n}")
        for m in (8, 16):
            print(f"  novelty M={m:2d}      {fmt(bench_novelty(S, m, args.repeats))}")
        for band, label in ((0, "full "), (7, "band7")):
            print(f"  cbm dp {label} L=32 {fmt(bench_cbm(S, band, 32, args.repeats))}")


if __name__ == "__main__":
    main()
