"""End-to-end runs through cli.main with in-process argv."""

import json

import pytest

from treeplace.cli import AGGREGATE_NOTICE, main
from tests.conftest import FIXTURES, load_fixture_text

WORKED = str(FIXTURES / "worked_example.json")
SHARED = str(FIXTURES / "shared_link.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_worked_example(capsys):
    code, out, err = run(capsys, "solve", WORKED)
    assert code == 0
    doc = json.loads(out)
    assert doc["feasible"] is True
    assert doc["replicas"] == ["a", "b", "c", "g", "i", "k", "p"]
    assert doc["count"] == 7
    assert "trace" not in doc
    assert err == ""


def test_solve_trace_flag(capsys):
    code, out, _ = run(capsys, "solve", WORKED, "--trace")
    assert code == 0
    trace = json.loads(out)["trace"]
    assert len(trace) == 19
    assert trace[0] == ["__r_plus__", 0, ["a"]]


def test_solve_reruns_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["solve", WORKED, "--out", str(a)]) == 0
    assert main(["solve", WORKED, "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_solve_infeasible_precheck(tmp_path, capsys):
    doc = {
        "W": 50,
        "nodes": [
            {"id": "r", "parent": None, "kind": "internal"},
            {"id": "c", "parent": "r", "kind": "client", "bw": 2, "w": 9, "q": 2},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "solve", str(path))
    assert code == 2
    body = json.loads(out)
    assert body["feasible"] is False
    assert body["reason"] == "client link bandwidth"
    assert body["details"] == [["c", "link-bandwidth", 9, 2]]


def test_solve_aggregate_prints_notice(capsys):
    code, out, err = run(capsys, "solve", SHARED, "--mode", "aggregate")
    assert code == 0
    assert AGGREGATE_NOTICE in err
    assert json.loads(out)["replicas"] == ["s"]


def test_solve_reads_stdin(tmp_path, capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(load_fixture_text("shared_link.json")))
    code, out, _ = run(capsys, "solve", "-")
    assert code == 0
    assert json.loads(out)["replicas"] == ["r"]


def test_verify_roundtrip(tmp_path, capsys):
    sol = tmp_path / "sol.json"
    assert main(["solve", WORKED, "--out", str(sol)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "verify", WORKED, str(sol))
    assert code == 0
    assert json.loads(out)["feasible"] is True


def test_verify_rejects_bad_set(tmp_path, capsys):
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps({"replicas": []}))
    code, out, _ = run(capsys, "verify", WORKED, str(sol))
    assert code == 2
    report = json.loads(out)
    assert report["feasible"] is False
    assert report["violations"]


def test_verify_malformed_solution_is_usage_error(tmp_path, capsys):
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps({"not": "a solution"}))
    code, _, err = run(capsys, "verify", WORKED, str(sol))
    assert code == 1
    assert "replicas" in err


def test_oracle_agrees_with_solver(capsys):
    code, out, _ = run(capsys, "oracle", SHARED)
    assert code == 0
    doc = json.loads(out)
    assert doc["minimum"] == 1
    assert doc["witness"] == ["r"]


def test_oracle_infeasible_exit(tmp_path, capsys):
    doc = {
        "W": 50,
        "nodes": [
            {"id": "r", "parent": None, "kind": "internal"},
            {"id": "c", "parent": "r", "kind": "client", "bw": 2, "w": 9, "q": 2},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "oracle", str(path))
    assert code == 2
    assert json.loads(out)["minimum"] is None


def test_oracle_guard_is_an_error(tmp_path, capsys):
    gen = tmp_path / "big.json"
    assert main(["gen", "--internal", "25", "--clients", "40", "--out", str(gen)]) == 0
    capsys.readouterr()
    code, _, err = run(capsys, "oracle", str(gen))
    assert code == 1
    assert "guard" in err


def test_gen_round_trips_through_solve(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["gen", "--seed", "3", "--capacity", "60", "--out", str(inst)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "solve", str(inst))
    assert code in (0, 2)
    assert json.loads(out)["feasible"] in (True, False)


def test_gen_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--seed", "11", "--shape", "balanced", "--branching", "2:2"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_gen_dual_role_and_fictivize(tmp_path, capsys):
    net = tmp_path / "net.json"
    inst = tmp_path / "inst.json"
    assert main(["gen", "--dual-role", "--seed", "5", "--internal", "6",
                 "--capacity", "9", "--out", str(net)]) == 0
    assert main(["gen", "--fictivize", str(net), "--out", str(inst)]) == 0
    capsys.readouterr()
    doc = json.loads(inst.read_text())
    assert any(n["id"].endswith("_req") for n in doc["nodes"])
    # the rewritten document is a normal instance the solver accepts
    assert main(["solve", str(inst)]) in (0, 2)
    capsys.readouterr()


def test_gen_bad_branching_syntax(capsys):
    code, _, err = run(capsys, "gen", "--branching", "nope")
    assert code == 1


def test_transform_emits_star_document(capsys):
    code, out, _ = run(capsys, "transform", WORKED)
    assert code == 0
    doc = json.loads(out)
    leaves = {n["id"]: n for n in doc["nodes"] if n["kind"] == "leaf"}
    # merged client bundle rides an unbounded (null) link
    assert leaves["x"]["bw"] is None
    assert leaves["x"]["eligible"] is False
    assert leaves["x"]["origin"] == {"clients": ["x", "x2"], "internal": None}
    assert leaves["l"]["origin"] == {"clients": ["zl"], "internal": "l"}


def test_transform_infeasible(tmp_path, capsys):
    doc = {
        "W": 3,
        "nodes": [
            {"id": "r", "parent": None, "kind": "internal"},
            {"id": "c1", "parent": "r", "kind": "client", "bw": 9, "w": 2, "q": 1},
            {"id": "c2", "parent": "r", "kind": "client", "bw": 9, "w": 2, "q": 1},
        ],
    }
    path = tmp_path / "heavy.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "transform", str(path))
    assert code == 2
    assert "bundle demand exceeds capacity" in err


def test_inspect_renders_tables(capsys):
    code, out, _ = run(capsys, "inspect", WORKED)
    assert code == 0
    assert "leaf contributions" in out
    assert "internal nodes" in out
    assert "inf" in out
    assert "m(t(v))" in out
    assert "{b,c}" in out  # the root equip set at index 0


def test_inspect_infeasible(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "W": 50,
        "nodes": [
            {"id": "r", "parent": None, "kind": "internal"},
            {"id": "c", "parent": "r", "kind": "client", "bw": 2, "w": 9, "q": 2},
        ],
    }))
    code, _, err = run(capsys, "inspect", str(path))
    assert code == 2
    assert "infeasible" in err


def test_bench_tiny_sweep(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "40,80", "--qos", "2")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("N=")]
    assert len(lines) == 2
    assert lines[0].startswith("N=40 L=2 t=")


def test_bench_rejects_garbage(capsys):
    code, _, err = run(capsys, "bench", "--sizes", "abc")
    assert code == 1
    code, _, err = run(capsys, "bench", "--sizes", ",")
    assert code == 1


def test_compare_small_range(capsys):
    code, out, _ = run(capsys, "compare", "--seeds", "0:4")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 6
    assert all(": agree " in l for l in lines[:-1])
    assert lines[-1] == "agreed 5/5"


def test_compare_bad_seed_spec(capsys):
    code, _, err = run(capsys, "compare", "--seeds", "x:y")
    assert code == 1
    assert "bad seed range" in err


def test_usage_errors_exit_one(capsys):
    assert main([]) == 1
    assert main(["solve"]) == 1
    assert main(["no-such-command"]) == 1
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_missing_file_is_reported(capsys):
    code, _, err = run(capsys, "solve", "/nonexistent/path.json")
    assert code == 1
    assert "error:" in err
