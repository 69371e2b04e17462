"""Equivalence of the compiled kernels and their pure-Python twin."""

import math
import random

import numpy as np
import pytest

from preflight.kernels import IMPLEMENTATION, _pure

try:
    from preflight.kernels import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled kernels not built")

IMPLS = [_pure] if _speedups is None else [_pure, _speedups]


def random_segment(rng):
    a = [rng.uniform(0, 30) for _ in range(3)]
    b = [rng.uniform(0, 30) for _ in range(3)]
    t0 = rng.uniform(0, 20)
    return (*a, t0, *b, t0 + rng.uniform(0.2, 10))


def random_packed(rng, n_paths):
    offsets = [0]
    ts, xs, ys, zs = [], [], [], []
    radii = []
    bounds = []
    for _ in range(n_paths):
        n = rng.randint(2, 12)
        t = rng.uniform(0, 10)
        x, y, z = rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0, 8)
        pt, px, py, pz = [], [], [], []
        for _ in range(n):
            pt.append(t)
            px.append(x)
            py.append(y)
            pz.append(z)
            t += rng.uniform(0.3, 2.0)
            x += rng.uniform(-1, 1)
            y += rng.uniform(-1, 1)
            z += rng.uniform(-0.5, 0.5)
        ts += pt
        xs += px
        ys += py
        zs += pz
        offsets.append(len(ts))
        radii.append(rng.uniform(0.3, 2.0))
        bounds.append(
            (pt[0], pt[-1], min(px), max(px), min(py), max(py), min(pz), max(pz))
        )
    return (
        np.array(offsets, dtype=np.int64),
        np.array(ts), np.array(xs), np.array(ys), np.array(zs),
        np.array(radii), np.array(bounds, dtype=np.float64).reshape(n_paths, 8),
    )


def test_selected_implementation_is_compiled_when_available():
    if _speedups is not None:
        assert IMPLEMENTATION == "cython"


@needs_ext
def test_segment_min_separation_matches_pure():
    rng = random.Random(77)
    for _ in range(2000):
        a = random_segment(rng)
        b = random_segment(rng)
        dp, tp = _pure.segment_min_separation(*a, *b)
        dc, tc = _speedups.segment_min_separation(*a, *b)
        if math.isinf(dp):
            assert math.isinf(dc)
        else:
            assert dc == pytest.approx(dp, abs=1e-12)
            assert tc == pytest.approx(tp, abs=1e-12)


@needs_ext
def test_count_conflicting_paths_matches_pure():
    rng = random.Random(78)
    for _ in range(200):
        packed = random_packed(rng, rng.randint(1, 8))
        wx, wy, wz = rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0, 8)
        wt0 = rng.uniform(0, 15)
        wt1 = wt0 + rng.uniform(0, 4)
        has_wait = rng.randint(0, 1)
        mx0, my0, mz0 = wx, wy, wz
        mx1, my1, mz1 = mx0 + rng.uniform(-2, 2), my0 + rng.uniform(-2, 2), mz0 + rng.uniform(-1, 1)
        mt0 = wt1
        mt1 = mt0 + rng.uniform(0.2, 3)
        dwell = rng.choice((0.0, rng.uniform(0, 10)))
        args = (wx, wy, wz, wt0, wt1, has_wait, mx0, my0, mz0, mx1, my1, mz1,
                mt0, mt1, dwell, rng.uniform(0.3, 1.5), 0.5)
        assert _pure.count_conflicting_paths(*packed, *args) == \
            _speedups.count_conflicting_paths(*packed, *args)


@needs_ext
def test_path_pair_min_separation_matches_pure():
    rng = random.Random(79)
    for _ in range(300):
        pa = random_packed(rng, 1)
        pb = random_packed(rng, 1)
        args_a = (pa[1], pa[2], pa[3], pa[4])
        args_b = (pb[1], pb[2], pb[3], pb[4])
        dp, tp = _pure.path_pair_min_separation(*args_a, *args_b)
        dc, tc = _speedups.path_pair_min_separation(*args_a, *args_b)
        if math.isinf(dp):
            assert math.isinf(dc)
        else:
            assert dc == pytest.approx(dp, abs=1e-12)
            assert tc == pytest.approx(tp, abs=1e-12)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_wait_hold_detection(impl):
    # one path hovering at the origin the whole time
    offsets = np.array([0, 2], dtype=np.int64)
    ts = np.array([0.0, 100.0])
    xs = np.array([0.0, 0.0])
    ys = np.array([0.0, 0.0])
    zs = np.array([0.0, 0.0])
    radii = np.array([0.5])
    bounds = np.array([[0.0, 100.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
    # hold 10 m away, then move to 20 m: never conflicts
    n = impl.count_conflicting_paths(
        offsets, ts, xs, ys, zs, radii, bounds,
        10.0, 0.0, 0.0, 0.0, 5.0, 1,
        10.0, 0.0, 0.0, 20.0, 0.0, 0.0, 5.0, 10.0,
        0.0, 0.5, 0.5,
    )
    assert n == 0
    # hold adjacent to the hovering path: conflicts during the hold
    n = impl.count_conflicting_paths(
        offsets, ts, xs, ys, zs, radii, bounds,
        1.0, 0.0, 0.0, 0.0, 5.0, 1,
        1.0, 0.0, 0.0, 20.0, 0.0, 0.0, 5.0, 10.0,
        0.0, 0.5, 0.5,
    )
    assert n == 1
    # far hold and far move, but a dwell at the move end overlapping the hover
    n = impl.count_conflicting_paths(
        offsets, ts, xs, ys, zs, radii, bounds,
        10.0, 0.0, 0.0, 0.0, 5.0, 1,
        10.0, 0.0, 0.0, 1.0, 0.0, 0.0, 5.0, 10.0,
        30.0, 0.5, 0.5,
    )
    assert n == 1
