import csv
import json
import os


from gridreach import generate_random, parse_grid, serialize_grid
from gridreach.cli import CSV_FIELDS, main

from conftest import FIXTURES

EXAMPLE = os.path.join(FIXTURES, "example12.grid")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.grid", tmp_path / "b.grid"
    assert run(capsys, "gen", "--m", "9", "--p", "0.5", "--seed", "4", "--out", str(a))[0] == 0
    assert run(capsys, "gen", "--m", "9", "--p", "0.5", "--seed", "4", "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text() == serialize_grid(generate_random(9, 0.5, 4))


def test_gen_extremes(capsys):
    code, out, _ = run(capsys, "gen", "--m", "5", "--p", "0")
    assert code == 0 and out == "grid 5\n"
    code, out, _ = run(capsys, "gen", "--m", "5", "--p", "1")
    assert len(out.splitlines()) == 1 + 4 * 5 * 6
    assert parse_grid(out).n_edges == 120


def test_reach_exit_codes(capsys):
    code, out, _ = run(capsys, "reach", EXAMPLE, "--s", "0,1", "--t", "12,11")
    assert code == 0 and out.startswith("true")
    code, out, _ = run(capsys, "reach", EXAMPLE, "--s", "0,1", "--t", "0,12", "--json")
    rec = json.loads(out)
    assert code == 1 and rec["answer"] is False
    assert set(rec) >= {"peak_core", "peak_conn", "queries", "depth", "ms"}


def test_reach_errors(capsys, tmp_path):
    assert run(capsys, "reach", EXAMPLE, "--s", "0,1", "--t", "13,0")[0] == 2
    assert run(capsys, "reach", str(tmp_path / "none.grid"), "--s", "0,0", "--t", "1,1")[0] == 2
    bad = tmp_path / "bad.grid"
    bad.write_text("grid 2\n0 0 2 0\n")
    code, _, err = run(capsys, "reach", str(bad), "--s", "0,0", "--t", "1,1")
    assert code == 2 and "line 2" in err
    assert run(capsys, "reach", EXAMPLE, "--s", "0-1", "--t", "1,1")[0] == 2


def test_psep_check(capsys, tmp_path):
    path = tmp_path / "g.grid"
    path.write_text(serialize_grid(generate_random(20, 0.7, 2)))
    code, out, _ = run(capsys, "psep-check", str(path), "--samples", "4", "--compact")
    rep = json.loads(out)
    assert code == 0 and rep["pass_rate"] == 1.0 and rep["samples"] == 4
    for r in rep["reports"]:
        assert {"h", "beta", "sep_size", "n_shadows", "max_component", "bound", "pass"} <= set(r)
        assert r["max_component"] <= r["bound"]


def test_psep_check_on_empty_grid(capsys, tmp_path):
    path = tmp_path / "e.grid"
    path.write_text("grid 0\n")
    code, out, _ = run(capsys, "psep-check", str(path), "--samples", "1")
    assert code == 0 and json.loads(out)["pass_rate"] == 1.0


def test_bench_rows(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, text, _ = run(capsys, "bench", "--sizes", "4", "8", "12", "--seeds", "2",
                        "--p", "0.7", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 * 2 * 2
    assert list(rows[0]) == CSV_FIELDS
    assert "dfs:" in text and "aux:" in text


def test_selftest_and_fault_injection(capsys):
    code, out, _ = run(capsys, "selftest", "--grids", "6")
    assert code == 0 and out.strip().endswith("selftest: pass")
    code, out, _ = run(capsys, "selftest", "--grids", "6", "--inject-fault", "crossing")
    assert code == 1
    assert "crossing edges imply the swapped edges: FAIL" in out


def test_usage_errors(capsys):
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "gen", "--m", "3")[0] == 2
