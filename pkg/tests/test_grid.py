import math
import random

import pytest

from preflight import ContractError, GridMap, ScenarioError, move_distance
from oracles import enumerate_neighbors


def test_interior_voxel_has_26_neighbors():
    g = GridMap((10, 10, 10))
    assert len(g.neighbors26((5, 5, 5))) == 26


def test_corner_voxel_has_7_neighbors():
    g = GridMap((10, 10, 10))
    assert len(g.neighbors26((0, 0, 0))) == 7


def test_obstacle_removes_one_neighbor():
    g = GridMap((3, 3, 3), frozenset({(1, 1, 0)}))
    nbrs = g.neighbors26((1, 1, 1))
    expected = enumerate_neighbors((3, 3, 3), {(1, 1, 0)}, (1, 1, 1))
    assert len(nbrs) == 25
    assert sorted(nbrs) == sorted(expected)


def test_neighbors_match_enumeration_on_random_grids():
    rng = random.Random(4)
    for _ in range(30):
        dims = (rng.randint(2, 8), rng.randint(2, 8), rng.randint(1, 6))
        obstacles = {
            (rng.randrange(dims[0]), rng.randrange(dims[1]), rng.randrange(dims[2]))
            for _ in range(rng.randint(0, 10))
        }
        g = GridMap(dims, frozenset(obstacles))
        v = (rng.randrange(dims[0]), rng.randrange(dims[1]), rng.randrange(dims[2]))
        assert sorted(g.neighbors26(v)) == sorted(enumerate_neighbors(dims, obstacles, v))


def test_neighbors_never_contain_self_or_blocked():
    rng = random.Random(9)
    g = GridMap((6, 6, 6), frozenset({(2, 2, 2), (3, 3, 3)}))
    for _ in range(40):
        v = (rng.randrange(6), rng.randrange(6), rng.randrange(6))
        nbrs = g.neighbors26(v)
        assert v not in nbrs
        assert not set(nbrs) & g.hard_obstacles
        assert len(nbrs) <= 26


def test_neighbor_order_is_deterministic_lexicographic():
    g = GridMap((5, 5, 5))
    nbrs = g.neighbors26((2, 2, 2))
    offsets = [(n[0] - 2, n[1] - 2, n[2] - 2) for n in nbrs]
    assert offsets == sorted(offsets)


def test_neighbors_out_of_bounds_raises():
    g = GridMap((4, 4, 4))
    with pytest.raises(ContractError):
        g.neighbors26((4, 0, 0))


def test_move_distance_values():
    assert move_distance((0, 0, 0), (0, 0, 0)) == 0.0
    assert move_distance((0, 0, 0), (1, 1, 0)) == pytest.approx(math.sqrt(2))
    assert move_distance((0, 0, 0), (1, 1, 1)) == pytest.approx(math.sqrt(3))
    assert move_distance((4, 4, 4), (4, 3, 4)) == 1.0


def test_move_distance_symmetry():
    rng = random.Random(2)
    for _ in range(50):
        a = (rng.randint(0, 9), rng.randint(0, 9), rng.randint(0, 9))
        d = (rng.choice((-1, 0, 1)), rng.choice((-1, 0, 1)), rng.choice((-1, 0, 1)))
        b = (a[0] + d[0], a[1] + d[1], a[2] + d[2])
        assert move_distance(a, b) == move_distance(b, a)


def test_move_distance_rejects_non_adjacent():
    with pytest.raises(ContractError):
        move_distance((0, 0, 0), (2, 0, 0))


def test_is_hard_blocked():
    g = GridMap((4, 4, 4), frozenset({(1, 2, 3)}))
    assert g.is_hard_blocked((1, 2, 3))
    assert not g.is_hard_blocked((0, 0, 0))
    assert not GridMap((4, 4, 4)).is_hard_blocked((1, 2, 3))


def test_out_of_bounds_obstacle_rejected():
    with pytest.raises(ScenarioError):
        GridMap((2, 2, 2), frozenset({(5, 0, 0)}))


def test_grid_equality_ignores_caches():
    a = GridMap((5, 5, 5), frozenset({(1, 1, 1)}))
    b = GridMap((5, 5, 5), frozenset({(1, 1, 1)}))
    a.neighbors26((0, 0, 0))
    assert a == b
