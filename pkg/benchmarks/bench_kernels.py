"""Benchmark the compiled kernels against the pure Python fallback.

Runs each hot kernel on identical inputs through both backends, checks the
outputs agree, and prints a timing table with speedup ratios.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5] [--seed 0]
"""

import argparse
import math
import time

import numpy as np

from gwexplore._core import pykernels
from gwexplore.rng import ExponentialSource, UniformSource, make_generator

try:
    from gwexplore._core import speedups
except ImportError:
    speedups = None

GUARD = 100_000_000


def time_best(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_zigzag_extrema(kernels, seed, replicas=200):
    out = []
    for r in range(replicas):
        exps = ExponentialSource(make_generator(seed, r))
        out.append(kernels.zigzag_extrema(exps, 1.0, 1.0, 4.0, 50, 0.0,
                                          0.5, GUARD))
    return out


def bench_zigzag_crossings(kernels, seed, replicas=200):
    levels = np.array([0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5])
    out = []
    for r in range(replicas):
        exps = ExponentialSource(make_generator(seed, r))
        out.append(kernels.zigzag_crossings(exps, 1.0, 1.0, 4.0, 50, levels,
                                            GUARD))
    return out


def bench_gillespie(kernels, seed, replicas=300):
    at_times = np.array([0.25, 0.5, 1.0])
    out = []
    for r in range(replicas):
        gen = make_generator(seed, r)
        exps = ExponentialSource(gen)
        unis = UniformSource(gen)
        out.append(kernels.gillespie_values_at(exps, unis, 200, 201.0,
                                               200.0, at_times, GUARD))
    return out


def bench_feller(kernels, seed, replicas=300):
    dt = 1e-3
    record_idx = np.array([249, 499, 999], dtype=np.int64)
    out = []
    for r in range(replicas):
        gen = make_generator(seed, r)
        normals = gen.standard_normal(1000)
        out.append(kernels.feller_values(1.0, 1.0 + 0.5 * dt,
                                         2.0 * math.sqrt(dt), normals,
                                         record_idx))
    return out


CASES = [
    ("zigzag_extrema", bench_zigzag_extrema),
    ("zigzag_crossings", bench_zigzag_crossings),
    ("gillespie_values_at", bench_gillespie),
    ("feller_values", bench_feller),
]


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repetitions, best is kept (default: 5)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if speedups is None:
        print("compiled extension not available; nothing to compare")
        return

    print("%-22s %10s %10s %9s" % ("kernel", "pure (s)", "fast (s)",
                                   "speedup"))
    for name, case in CASES:
        ref = case(pykernels, args.seed)
        got = case(speedups, args.seed)
        if not all(same(a, b) for a, b in zip(ref, got)):
            raise SystemExit("backend outputs differ for %s" % name)
        t_pure = time_best(lambda: case(pykernels, args.seed), args.repeats)
        t_fast = time_best(lambda: case(speedups, args.seed), args.repeats)
        print("%-22s %10.4f %10.4f %8.1fx" % (name, t_pure, t_fast,
                                              t_pure / t_fast))


if __name__ == "__main__":
    main()
