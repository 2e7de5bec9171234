#!/usr/bin/env python3
"""Benchmark the compiled tree kernels against the pure-NumPy fallback.

Times tree growth (gini and Newton) and traversal on matrices shaped like
the credit-benchmark workloads, verifies both backends return identical
trees, and prints a speedup table.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from fairhpo._core import COMPILED, fallback

if COMPILED:
    from fairhpo._core import kernels
else:
    kernels = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_case(name, build_args, repeats):
    rows = []
    for label, backend in (("compiled", kernels), ("fallback", fallback)):
        if backend is None:
            continue
        kind, args = build_args
        fn = getattr(backend, kind)
        t, out = timeit(lambda: fn(*args), repeats)
        rows.append((label, t, out))
    if len(rows) == 2:
        (_, tc, out_c), (_, tf, out_f) = rows
        for u, v in zip(out_c, out_f):
            assert np.array_equal(u, v), f"{name}: backend mismatch"
        print(f"{name:<38} compiled {tc*1e3:8.2f} ms   fallback {tf*1e3:8.2f} ms"
              f"   speedup {tf/tc:6.1f}x")
    else:
        label, t, _ = rows[0]
        print(f"{name:<38} {label} {t*1e3:8.2f} ms")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if not COMPILED:
        print("compiled extension unavailable; timing fallback only")

    rng = np.random.default_rng(0)
    for m, f in ((200, 12), (800, 12), (800, 45), (2000, 20)):
        X = np.ascontiguousarray(rng.random((m, f)))
        X[::3, 0] = np.round(X[::3, 0], 1)
        y = rng.integers(0, 2, m).astype(np.int64)
        bench_case(f"grow_tree_gini    m={m:<5} f={f:<3}",
                   ("grow_tree_gini", (X, y, 12, 2, 1, max(1, f // 2), 42)),
                   args.repeats)
        g = rng.normal(size=m)
        h = rng.random(m) * 0.25 + 1e-3
        bench_case(f"grow_tree_newton  m={m:<5} f={f:<3}",
                   ("grow_tree_newton", (X, g, h, 6, 1.0)),
                   args.repeats)

    X = np.ascontiguousarray(rng.random((800, 12)))
    y = rng.integers(0, 2, 800).astype(np.int64)
    grower = kernels if COMPILED else fallback
    tree = grower.grow_tree_gini(X, y, 12, 2, 1, 6, 7)
    Xt = np.ascontiguousarray(rng.random((20_000, 12)))
    bench_case("tree_apply        20k rows",
               ("tree_apply", (*tree, Xt)), args.repeats)


if __name__ == "__main__":
    main()
