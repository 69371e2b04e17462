import io
import json

import pytest

from preflight import (
    GridMap,
    NoFlyZone,
    ScenarioError,
    SolveResult,
    SolverParams,
    Trajectory,
    UavProfile,
    build_city_fleet,
    export_solution,
    generate_scenario,
    load_city_map,
    load_scenario,
    load_solution,
    save_scenario,
)
from preflight.scenario import LowAltitudeNfzWarning, Scenario


def roundtrip(scenario):
    buf = io.StringIO()
    save_scenario(scenario, buf)
    return load_scenario(io.StringIO(buf.getvalue())), buf.getvalue()


class TestGeneration:
    def test_empty_fleet(self):
        scen = generate_scenario((10, 10, 5), 0.0, 0, 0, seed=1)
        assert scen.fleet == ()
        assert scen.grid.hard_obstacles == frozenset()

    def test_zero_density_no_obstacles(self):
        scen = generate_scenario((10, 10, 5), 0.0, 3, 0, seed=1)
        assert not scen.grid.hard_obstacles

    def test_obstacle_count_and_layering(self):
        scen = generate_scenario((20, 20, 10), 0.05, 0, 0, seed=7)
        n = len(scen.grid.hard_obstacles)
        assert n == int(0.05 * 20 * 20 * 10)
        assert all(v[2] <= 3 for v in scen.grid.hard_obstacles)

    def test_profile_ranges(self):
        scen = generate_scenario((15, 15, 8), 0.03, 12, 0, seed=3)
        for p in scen.fleet:
            assert 1.0 <= p.t_init <= 1000.0
            assert 0.5 <= p.radius <= 2.0
            assert 1.0 <= p.speed <= 5.0
            assert p.hub != p.delivery
            assert not scen.grid.is_hard_blocked(p.hub)
            assert not scen.grid.is_hard_blocked(p.delivery)

    def test_nfz_windows_and_open_airspace(self):
        scen = generate_scenario((20, 20, 10), 0.05, 0, 3, seed=5)
        assert len(scen.nfzs) == 3
        open_volume = 20 * 20 * 6
        for z in scen.nfzs:
            assert 100.0 <= z.t_start < z.t_end <= 500.0
            assert all(v[2] >= 4 for v in z.region)
            assert 0.02 <= len(z.region) / open_volume <= 0.05

    def test_determinism(self):
        a = generate_scenario((12, 12, 6), 0.04, 5, 2, seed=42)
        b = generate_scenario((12, 12, 6), 0.04, 5, 2, seed=42)
        assert a == b
        _, bytes_a = roundtrip(a)
        _, bytes_b = roundtrip(b)
        assert bytes_a == bytes_b

    def test_seed_changes_output(self):
        a = generate_scenario((12, 12, 6), 0.04, 5, 2, seed=1)
        b = generate_scenario((12, 12, 6), 0.04, 5, 2, seed=2)
        assert a != b

    def test_nfz_prefix_stable_as_count_grows(self):
        # obstacles and fleet draw before zones, so adding zones must not
        # perturb the world or missions
        a = generate_scenario((12, 12, 6), 0.04, 5, 0, seed=9)
        b = generate_scenario((12, 12, 6), 0.04, 5, 2, seed=9)
        c = generate_scenario((12, 12, 6), 0.04, 5, 4, seed=9)
        assert a.grid == b.grid == c.grid
        assert a.fleet == b.fleet == c.fleet
        assert b.nfzs == c.nfzs[:2]

    def test_density_overflow_rejected(self):
        with pytest.raises(ScenarioError):
            generate_scenario((10, 10, 10), 0.5, 0, 0, seed=1)  # needs 500 of 400 ground voxels


class TestScenarioJson:
    def test_roundtrip_identity(self):
        scen = generate_scenario((14, 14, 6), 0.05, 6, 2, seed=8)
        loaded, _ = roundtrip(scen)
        assert loaded == scen

    def test_missing_field_names_path(self):
        scen = generate_scenario((8, 8, 4), 0.0, 1, 0, seed=1)
        buf = io.StringIO()
        save_scenario(scen, buf)
        doc = json.loads(buf.getvalue())
        del doc["fleet"][0]["radius"]
        with pytest.raises(ScenarioError, match=r"fleet\[0\]"):
            load_scenario(io.StringIO(json.dumps(doc)))

    def test_reversed_zone_window_rejected(self):
        scen = generate_scenario((8, 8, 5), 0.0, 1, 1, seed=2)
        buf = io.StringIO()
        save_scenario(scen, buf)
        doc = json.loads(buf.getvalue())
        doc["nfzs"][0]["t_end"] = doc["nfzs"][0]["t_start"] - 1
        with pytest.raises(ScenarioError, match="t_end"):
            load_scenario(io.StringIO(json.dumps(doc)))

    def test_bad_format_tag(self):
        with pytest.raises(ScenarioError, match="format"):
            load_scenario(io.StringIO(json.dumps({"format": "nope"})))

    def test_non_box_region_roundtrips_as_voxels(self):
        grid = GridMap((6, 6, 6))
        region = frozenset({(0, 0, 4), (1, 1, 4), (2, 2, 4)})
        scen = Scenario(
            grid, (NoFlyZone(region, 10.0, 20.0),),
            (UavProfile("u0", (0, 0, 0), (5, 5, 5), 1.0, 2.0, 0.5),),
            SolverParams(seed=0),
        )
        loaded, raw = roundtrip(scen)
        assert loaded.nfzs[0].region == region
        assert "voxels" in raw

    def test_obstacle_out_of_bounds_has_path(self):
        doc = {
            "format": "preflight.scenario/1",
            "grid": {"dims": [4, 4, 4], "obstacles": [[9, 0, 0]]},
            "nfzs": [],
            "fleet": [],
            "params": {
                "gamma": 0.5, "wait": 10.0, "neighborhood": 10,
                "time_limit": 60.0, "seed": 0, "pruning": True, "soft_mode": "soft",
            },
        }
        with pytest.raises(ScenarioError, match="grid"):
            load_scenario(io.StringIO(json.dumps(doc)))


class TestSolutionJson:
    def result(self):
        traj = Trajectory(
            "u0", [((0, 0, 0), 1.0), ((1, 1, 0), 2.4142135623730951), ((0, 0, 0), 3.82842712474619)],
            1, 0, 0.75,
        )
        return SolveResult(
            status="success", paths={"u0": traj}, flowtime=traj.duration,
            iterations=2, conflict_history=[3, 1, 0], wall_time=0.5, expanded_nodes=123,
        )

    def test_export_and_load(self):
        buf = io.StringIO()
        export_solution(self.result(), buf)
        meta, trajs = load_solution(io.StringIO(buf.getvalue()))
        assert meta["status"] == "success"
        assert meta["partial"] is False
        assert len(trajs) == 1
        assert trajs[0].points == self.result().paths["u0"].points
        assert trajs[0].radius == 0.75

    def test_timeout_flagged_partial(self):
        res = self.result()
        res.status = "timeout"
        buf = io.StringIO()
        export_solution(res, buf)
        doc = json.loads(buf.getvalue())
        assert doc["status"] == "timeout"
        assert doc["partial"] is True

    def test_empty_fleet_result(self):
        buf = io.StringIO()
        export_solution(SolveResult(status="success"), buf)
        doc = json.loads(buf.getvalue())
        assert doc["paths"] == []
        assert doc["flowtime"] == 0.0


CITY_DOC = {
    "format": "preflight.citymap/1",
    "dims": [40, 40, 25],
    "obstacles": {"boxes": [[[0, 0, 0], [39, 39, 2]]], "voxels": [[5, 5, 3]]},
    "hubs": {"north": [10, 30, 5], "south": [10, 5, 5], "depot": [30, 20, 5]},
    "nfzs": [
        {"region": {"box": [[0, 0, 14], [10, 10, 20]]}, "t_start": 100.0, "t_end": 400.0}
    ],
}


class TestCityMap:
    def test_load_city_map(self):
        grid, hubs, nfzs = load_city_map(io.StringIO(json.dumps(CITY_DOC)))
        assert grid.dims == (40, 40, 25)
        assert grid.is_hard_blocked((5, 5, 3))
        assert grid.is_hard_blocked((12, 17, 1))
        assert hubs["north"] == (10, 30, 5)
        assert len(nfzs) == 1 and nfzs[0].t_end == 400.0

    def test_hub_inside_obstacle_rejected(self):
        doc = dict(CITY_DOC, hubs={"bad": [0, 0, 1]})
        with pytest.raises(ScenarioError, match="hubs.bad"):
            load_city_map(io.StringIO(json.dumps(doc)))

    def test_low_zone_warns_but_loads(self):
        doc = json.loads(json.dumps(CITY_DOC))
        doc["nfzs"][0]["region"] = {"box": [[0, 0, 7], [5, 5, 20]]}
        with pytest.warns(LowAltitudeNfzWarning):
            grid, hubs, nfzs = load_city_map(io.StringIO(json.dumps(doc)))
        assert len(nfzs) == 1

    def test_build_city_fleet(self):
        grid, hubs, _ = load_city_map(io.StringIO(json.dumps(CITY_DOC)))
        fleet = build_city_fleet(grid, hubs, 10, seed=4)
        assert len(fleet) == 10
        hub_set = set(hubs.values())
        for p in fleet:
            assert p.hub in hub_set
            assert 1.5 <= p.speed <= 3.0
            assert 1.0 <= p.radius <= 2.0
        assert fleet == build_city_fleet(grid, hubs, 10, seed=4)


class TestScenarioValidation:
    def test_duplicate_fleet_ids(self):
        g = GridMap((5, 5, 5))
        p = UavProfile("x", (0, 0, 0), (1, 1, 1), 1.0, 1.0, 0.5)
        q = UavProfile("x", (2, 2, 2), (3, 3, 3), 1.0, 1.0, 0.5)
        with pytest.raises(ScenarioError, match="unique"):
            Scenario(g, (), (p, q), SolverParams(seed=0))

    def test_hub_on_obstacle(self):
        g = GridMap((5, 5, 5), frozenset({(0, 0, 0)}))
        p = UavProfile("x", (0, 0, 0), (1, 1, 1), 1.0, 1.0, 0.5)
        with pytest.raises(ScenarioError, match="obstacle"):
            Scenario(g, (), (p,), SolverParams(seed=0))

    def test_params_validation(self):
        with pytest.raises(ScenarioError):
            SolverParams(neighborhood=1)
        with pytest.raises(ScenarioError):
            SolverParams(time_limit=0)
        with pytest.raises(ScenarioError):
            SolverParams(soft_mode="fuzzy")
