import json

import pytest

from preflight.bench import CSV_COLUMNS, load_suite, read_rows, run_suite, summarize
from preflight.cli import main
from preflight.scenario import load_scenario, load_solution


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "tiny.scenario.json"
    rc = main([
        "generate", "--dims", "12", "12", "4", "--density", "0.03", "--agents", "2",
        "--nfzs", "1", "--seed", "3", "--time-limit", "60", "--out", str(path),
    ])
    assert rc == 0
    return path


def test_generate_writes_loadable_scenario(scenario_file):
    scen = load_scenario(str(scenario_file))
    assert len(scen.fleet) == 2
    assert len(scen.nfzs) == 1


def test_solve_validate_roundtrip(tmp_path, scenario_file):
    sol = tmp_path / "out.solution.json"
    rc = main(["solve", str(scenario_file), "--out", str(sol)])
    assert rc == 0
    meta, trajs = load_solution(str(sol))
    assert meta["status"] == "success"
    assert len(trajs) == 2

    report = tmp_path / "report.json"
    rc = main(["validate", str(scenario_file), str(sol), "--report", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["ok"] is True

    # tamper: drag one waypoint onto the other path's corridor start
    doc_sol = json.loads(sol.read_text())
    doc_sol["paths"][0]["points"] = doc_sol["paths"][1]["points"]
    doc_sol["paths"][0]["outbound_index"] = doc_sol["paths"][1]["outbound_index"]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc_sol))
    rc = main(["validate", str(scenario_file), str(tampered)])
    assert rc == 1


def test_solve_pp_variant(tmp_path, scenario_file):
    sol = tmp_path / "pp.solution.json"
    rc = main(["solve", str(scenario_file), "--solver", "pp", "--out", str(sol)])
    assert rc == 0
    meta, _ = load_solution(str(sol))
    assert meta["status"] == "success"


def test_solve_flag_overrides(tmp_path, scenario_file):
    sol = tmp_path / "s.json"
    rc = main([
        "solve", str(scenario_file), "--no-pruning", "--seed", "9",
        "--gamma", "0.3", "--neighborhood", "4", "--time-limit", "30",
        "--out", str(sol),
    ])
    assert rc == 0


def test_determinism_across_cli_runs(tmp_path, scenario_file):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["solve", str(scenario_file), "--out", str(a)]) == 0
    assert main(["solve", str(scenario_file), "--out", str(b)]) == 0
    da = json.loads(a.read_text())
    db = json.loads(b.read_text())
    da.pop("wall_time")
    db.pop("wall_time")
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_missing_scenario_path_is_usage_error(tmp_path):
    rc = main(["solve", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.json")])
    assert rc == 2


def test_out_dir_env_var(tmp_path, scenario_file, monkeypatch):
    monkeypatch.setenv("PREFLIGHT_OUT_DIR", str(tmp_path / "outputs"))
    rc = main(["solve", str(scenario_file), "--out", "rel.solution.json"])
    assert rc == 0
    assert (tmp_path / "outputs" / "rel.solution.json").exists()


SUITE = {
    "name": "tiny",
    "dims": [12, 12, 4],
    "densities": [0.03],
    "agent_counts": [1, 2],
    "nfz_counts": [1],
    "seeds": [1, 2],
    "solvers": ["dtapp", "pp"],
    "pruning": [True],
    "time_limit": 60,
}


def test_bench_suite_and_summary(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(SUITE))
    out = tmp_path / "runs.csv"
    rc = main(["bench", str(suite), "--out", str(out)])
    assert rc == 0
    rows = read_rows(str(out))
    assert len(rows) == 8  # 2 agent counts x 2 seeds x 2 solvers
    assert set(rows[0]) == set(CSV_COLUMNS)
    assert all(r["status"] == "success" for r in rows)

    summary = summarize(rows, time_limit=60)
    assert all(s["success_rate"] == 100.0 for s in summary)

    # appending keeps one header
    rc = main(["bench", str(suite), "--out", str(out)])
    assert rc == 0
    assert len(read_rows(str(out))) == 16

    rc = main(["bench", "--summarize-only", str(out), "--time-limit", "60"])
    assert rc == 0


def test_bench_rows_reproducible(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(dict(SUITE, agent_counts=[2], solvers=["dtapp"])))
    specs = load_suite(str(suite))
    rows_a = run_suite(specs)
    rows_b = run_suite(specs)
    drop = lambda r: {k: v for k, v in r.items() if k != "wall_time"}
    assert [drop(r) for r in rows_a] == [drop(r) for r in rows_b]


def test_bench_parallel_matches_serial(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(dict(SUITE, agent_counts=[1, 2], seeds=[1], solvers=["dtapp"])))
    specs = load_suite(str(suite))
    serial = run_suite(specs, jobs=1)
    parallel = run_suite(specs, jobs=2)
    drop = lambda r: {k: v for k, v in r.items() if k != "wall_time"}
    assert [drop(r) for r in serial] == [drop(r) for r in parallel]


def test_summarize_substitutes_time_limit():
    rows = [
        {"scenario_id": "x", "solver": "dtapp", "pruning": "1", "agents": "5",
         "density": "0.05", "nfz_count": "0", "seed": "1", "status": "success",
         "wall_time": "10.0", "flowtime": "100.0", "iterations": "0",
         "expanded_nodes": "10", "final_conflicts": "0"},
        {"scenario_id": "y", "solver": "dtapp", "pruning": "1", "agents": "5",
         "density": "0.05", "nfz_count": "0", "seed": "2", "status": "timeout",
         "wall_time": "299.0", "flowtime": "0.0", "iterations": "5",
         "expanded_nodes": "10", "final_conflicts": "3"},
    ]
    s = summarize(rows, time_limit=300.0)[0]
    assert s["success_rate"] == 50.0
    assert s["runtime_mean"] == pytest.approx((10.0 + 300.0) / 2)
    assert s["flowtime_mean"] == pytest.approx(100.0)

    empty = summarize([], time_limit=300.0)
    assert empty == []
