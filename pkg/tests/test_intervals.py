import math
import random

import pytest

from preflight import ContractError, GridMap, NoFlyZone, SafeInterval, ScenarioError, build_sfi_table
from oracles import sample_safe

INF = math.inf


def box(lo, hi):
    return frozenset(
        (x, y, z)
        for x in range(lo[0], hi[0] + 1)
        for y in range(lo[1], hi[1] + 1)
        for z in range(lo[2], hi[2] + 1)
    )


def test_unrestricted_voxel_has_full_window():
    g = GridMap((5, 5, 5))
    t = build_sfi_table(g, [NoFlyZone(frozenset({(0, 0, 0)}), 10, 20)])
    assert t.intervals_at((4, 4, 4)) == (SafeInterval(0.0, INF),)


def test_single_zone_complement():
    g = GridMap((5, 5, 5))
    t = build_sfi_table(g, [NoFlyZone(frozenset({(1, 1, 1)}), 100, 500)])
    assert t.intervals_at((1, 1, 1)) == (SafeInterval(0, 100), SafeInterval(500, INF))


def test_overlapping_zones_merge():
    g = GridMap((5, 5, 5))
    v = frozenset({(2, 2, 2)})
    t = build_sfi_table(g, [NoFlyZone(v, 100, 200), NoFlyZone(v, 150, 300)])
    assert t.intervals_at((2, 2, 2)) == (SafeInterval(0, 100), SafeInterval(300, INF))


def test_touching_zones_merge_into_one_gap():
    g = GridMap((5, 5, 5))
    v = frozenset({(2, 2, 2)})
    t = build_sfi_table(g, [NoFlyZone(v, 100, 200), NoFlyZone(v, 200, 300)])
    assert t.intervals_at((2, 2, 2)) == (SafeInterval(0, 100), SafeInterval(300, INF))


def test_zone_starting_at_zero_drops_leading_window():
    g = GridMap((5, 5, 5))
    t = build_sfi_table(g, [NoFlyZone(frozenset({(0, 0, 1)}), 0, 50)])
    assert t.intervals_at((0, 0, 1)) == (SafeInterval(50, INF),)


def test_blocked_voxel_has_no_windows():
    g = GridMap((5, 5, 5), frozenset({(3, 3, 3)}))
    t = build_sfi_table(g, [])
    assert t.intervals_at((3, 3, 3)) == ()


def test_exempt_voxel_keeps_full_window():
    g = GridMap((5, 5, 5))
    v = frozenset({(2, 2, 2)})
    t = build_sfi_table(g, [NoFlyZone(v, 0, 1e9)], exempt={(2, 2, 2)})
    assert t.intervals_at((2, 2, 2)) == (SafeInterval(0.0, INF),)


def test_windows_match_dense_sampling_oracle():
    rng = random.Random(17)
    g = GridMap((6, 6, 4))
    for _ in range(20):
        zones = []
        for _ in range(rng.randint(1, 4)):
            lo = (rng.randint(0, 4), rng.randint(0, 4), rng.randint(0, 2))
            hi = (min(5, lo[0] + 1), min(5, lo[1] + 1), min(3, lo[2] + 1))
            t0 = rng.uniform(0, 400)
            zones.append(NoFlyZone(box(lo, hi), t0, t0 + rng.uniform(1, 300)))
        table = build_sfi_table(g, zones)
        raw = [(z.region, z.t_start, z.t_end) for z in zones]
        v = (rng.randint(0, 5), rng.randint(0, 5), rng.randint(0, 3))
        ivs = table.intervals_at(v)
        horizon = 800.0
        t = 0.0
        while t < horizon:
            in_table = any(s <= t < e for s, e in ivs)
            assert in_table == sample_safe(raw, v, t), (v, t, ivs)
            t += 0.5


def test_gap_lengths_equal_zone_coverage():
    g = GridMap((5, 5, 5))
    v = frozenset({(1, 2, 3)})
    zones = [NoFlyZone(v, 50, 120), NoFlyZone(v, 300, 420), NoFlyZone(v, 100, 140)]
    table = build_sfi_table(g, zones)
    ivs = table.intervals_at((1, 2, 3))
    gaps = sum(ivs[k + 1].start - ivs[k].end for k in range(len(ivs) - 1))
    assert gaps == pytest.approx((140 - 50) + (420 - 300))


def test_intervals_are_sorted_disjoint_maximal():
    rng = random.Random(3)
    g = GridMap((4, 4, 4))
    v = frozenset({(0, 0, 0)})
    for _ in range(15):
        zones = [
            NoFlyZone(v, t0 := rng.uniform(0, 500), t0 + rng.uniform(0.5, 200))
            for _ in range(rng.randint(1, 6))
        ]
        ivs = build_sfi_table(g, zones).intervals_at((0, 0, 0))
        for k in range(len(ivs)):
            assert ivs[k].start < ivs[k].end
            if k:
                assert ivs[k].start > ivs[k - 1].end  # maximal: no shared endpoints
        assert ivs[-1].end == INF


def test_first_safe_interval():
    g = GridMap((5, 5, 5))
    v = frozenset({(2, 2, 2)})
    t = build_sfi_table(g, [NoFlyZone(v, 100, 500)])
    assert t.first_safe_interval((2, 2, 2), 50) == SafeInterval(0, 100)
    assert t.first_safe_interval((2, 2, 2), 200) == SafeInterval(500, INF)
    blocked = build_sfi_table(GridMap((5, 5, 5), frozenset({(1, 1, 1)})), [])
    assert blocked.first_safe_interval((1, 1, 1), 0) is None


def test_next_wait_interval():
    g = GridMap((5, 5, 5))
    v = frozenset({(2, 2, 2)})
    t = build_sfi_table(g, [NoFlyZone(v, 100, 500)])
    first, second = t.intervals_at((2, 2, 2))
    assert t.next_wait_interval((2, 2, 2), first) == second
    assert t.next_wait_interval((2, 2, 2), second) is None
    assert t.next_wait_interval((0, 0, 0), SafeInterval(0.0, INF)) is None
    with pytest.raises(ContractError):
        t.next_wait_interval((2, 2, 2), SafeInterval(1.0, 2.0))


def test_zone_out_of_bounds_rejected():
    g = GridMap((3, 3, 3))
    with pytest.raises(ScenarioError):
        build_sfi_table(g, [NoFlyZone(frozenset({(9, 9, 9)}), 0, 10)])


def test_zone_validation():
    with pytest.raises(ScenarioError):
        NoFlyZone(frozenset(), 0, 10)
    with pytest.raises(ScenarioError):
        NoFlyZone(frozenset({(0, 0, 0)}), 10, 10)
    with pytest.raises(ScenarioError):
        NoFlyZone(frozenset({(0, 0, 0)}), -1, 10)
