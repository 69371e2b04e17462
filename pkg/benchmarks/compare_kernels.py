"""Benchmark the compiled conflict kernels against the pure-Python twin.

Usage: python benchmarks/compare_kernels.py [--repeat N]

Times the three kernel entry points on synthetic planner-shaped workloads
and prints the speedup of the compiled extension. Useful after touching
either implementation or when deciding whether a platform needs the
compiled build at all.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import numpy as np

from preflight.kernels import _pure

try:
    from preflight.kernels import _speedups
except ImportError:
    _speedups = None


def build_segment_batch(rng, n):
    out = []
    for _ in range(n):
        a = [rng.uniform(0, 100) for _ in range(3)]
        b = [a[k] + rng.uniform(-2, 2) for k in range(3)]
        t0 = rng.uniform(0, 500)
        t1 = t0 + rng.uniform(0.2, 2.0)
        c = [rng.uniform(0, 100) for _ in range(3)]
        d = [c[k] + rng.uniform(-2, 2) for k in range(3)]
        s0 = t0 + rng.uniform(-1, 1)
        s1 = s0 + rng.uniform(0.2, 2.0)
        out.append((*a, t0, *b, t1, *c, s0, *d, s1))
    return out


def build_fleet(rng, n_paths, n_points):
    offsets = [0]
    ts, xs, ys, zs = [], [], [], []
    radii, bounds = [], []
    for _ in range(n_paths):
        t = rng.uniform(0, 100)
        x, y, z = rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(4, 9)
        pt, px, py, pz = [], [], [], []
        for _ in range(n_points):
            pt.append(t)
            px.append(x)
            py.append(y)
            pz.append(z)
            t += rng.uniform(0.3, 1.2)
            x += rng.uniform(-1, 1)
            y += rng.uniform(-1, 1)
            z += rng.uniform(-0.3, 0.3)
        ts += pt; xs += px; ys += py; zs += pz
        offsets.append(len(ts))
        radii.append(rng.uniform(0.5, 2.0))
        bounds.append((pt[0], pt[-1], min(px), max(px), min(py), max(py), min(pz), max(pz)))
    return (
        np.array(offsets, dtype=np.int64),
        np.array(ts), np.array(xs), np.array(ys), np.array(zs),
        np.array(radii), np.array(bounds, dtype=np.float64),
    )


def bench(label, fn, args_iter, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in args_iter:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    rng = random.Random(1)

    seg_batch = build_segment_batch(rng, 20000)
    fleet = build_fleet(rng, 60, 200)
    queries = []
    for _ in range(2000):
        x, y, z = rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(4, 9)
        t0 = rng.uniform(0, 200)
        queries.append((
            *fleet,
            x, y, z, t0, t0 + rng.uniform(0, 3), 1,
            x, y, z, x + 1, y + 1, z, t0 + 3, t0 + 4,
            rng.choice((0.0, 10.0)), 1.0, 0.5,
        ))
    pair_args = []
    for _ in range(300):
        a = build_fleet(rng, 1, 300)
        b = build_fleet(rng, 1, 300)
        pair_args.append((a[1], a[2], a[3], a[4], b[1], b[2], b[3], b[4]))

    workloads = [
        ("segment_min_separation x20k", "segment_min_separation", seg_batch),
        ("count_conflicting_paths x2k (60 paths)", "count_conflicting_paths", queries),
        ("path_pair_min_separation x300 (300 pts)", "path_pair_min_separation", pair_args),
    ]

    print(f"{'workload':<42} {'pure (s)':>10} {'cython (s)':>11} {'speedup':>8}")
    print("-" * 75)
    for label, name, batch in workloads:
        t_pure = bench(label, getattr(_pure, name), batch, args.repeat)
        if _speedups is None:
            print(f"{label:<42} {t_pure:>10.3f} {'n/a':>11} {'n/a':>8}")
            continue
        t_cy = bench(label, getattr(_speedups, name), batch, args.repeat)
        print(f"{label:<42} {t_pure:>10.3f} {t_cy:>11.3f} {t_pure / t_cy:>7.1f}x")
    if _speedups is None:
        print("\ncompiled kernels unavailable; build with: python setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
