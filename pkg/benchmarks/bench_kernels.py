#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Runs the two hot kernels (coset materialization, convolution product
classification) through both backends on identical inputs, verifies the
outputs agree exactly, and reports best-of-N wall times with speedups.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import sys
import time

import numpy as np

from heckelab import _pure
from heckelab.padic_hecke import Cocharacter, _diag_counts, _reach_sets, coset_matrix_array

try:
    from heckelab import _speedups
except ImportError:
    _speedups = None

MATERIALIZE_CASES = [
    ((2, 1, 0), 3),
    ((2, 2, 0), 3),
    ((3, 2, 0), 2),
    ((3, 3, 0), 3),
    ((4, 4, 0), 5),
]

CLASSIFY_CASES = [
    ((1, 0), (1, 0), 3),
    ((2, 0), (2, 0), 5),
    ((1, 0, 0), (1, 1, 0), 2),
    ((2, 1, 0), (1, 1, 0), 2),
]

BUDGET = 10**7


def time_best(func, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = func()
        best = min(best, time.perf_counter() - t0)
    return best, result


def run_materialize(backend, parts, p):
    n = len(parts)
    omega = Cocharacter(n, parts)
    work = []
    for b in sorted(_diag_counts(n, p, omega.parts)):
        work.append((b, _reach_sets(omega.parts, b, p)))

    def job():
        return [backend.materialize_b(n, p, b, reach, BUDGET) for b, reach in work]

    return job


def run_classify(backend, lam, mu, p):
    n = len(lam)
    xs = coset_matrix_array(Cocharacter(n, lam), p)
    ys = coset_matrix_array(Cocharacter(n, mu), p)
    prec = p ** (sum(lam) + sum(mu) + 4)

    def job():
        return backend.classify_products(xs, ys, n, p, prec)

    return job


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="repetitions per case")
    args = parser.parse_args(argv)

    if _speedups is None:
        print("compiled extension is not built; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    failures = 0
    for parts, p in MATERIALIZE_CASES:
        t_pure, out_pure = time_best(run_materialize(_pure, parts, p), args.repeat)
        t_fast, out_fast = time_best(run_materialize(_speedups, parts, p), args.repeat)
        same = len(out_pure) == len(out_fast) and all(
            np.array_equal(a, b) for a, b in zip(out_pure, out_fast)
        )
        failures += 0 if same else 1
        size = sum(a.shape[0] for a in out_pure)
        label = "materialize " + ",".join(map(str, parts)) + f" p={p}"
        rows.append((label, size, t_pure, t_fast, same))
    for lam, mu, p in CLASSIFY_CASES:
        t_pure, out_pure = time_best(run_classify(_pure, lam, mu, p), args.repeat)
        t_fast, out_fast = time_best(run_classify(_speedups, lam, mu, p), args.repeat)
        same = out_pure == out_fast
        failures += 0 if same else 1
        size = sum(out_pure.values())
        label = (
            "classify "
            + ",".join(map(str, lam))
            + " * "
            + ",".join(map(str, mu))
            + f" p={p}"
        )
        rows.append((label, size, t_pure, t_fast, same))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'items':>9}  {'pure (s)':>10}  {'compiled (s)':>12}  {'speedup':>8}  match")
    for label, size, t_pure, t_fast, same in rows:
        speed = t_pure / t_fast if t_fast > 0 else float("inf")
        print(
            f"{label:<{width}}  {size:>9}  {t_pure:>10.4f}  {t_fast:>12.4f}  "
            f"{speed:>7.2f}x  {'yes' if same else 'NO'}"
        )
    if failures:
        print(f"{failures} case(s) disagreed between backends", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
