from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from chaincodes.cli import main, run
from chaincodes.schemas import validate


def call(argv, stdin: str | None = None, monkeypatch=None):
    """Run the CLI in-process, feeding ``stdin``; returns (exit code, report)."""
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
    return run(argv)


@pytest.fixture
def torus_file(tmp_path):
    path = tmp_path / "torus3.json"
    code, _ = run(["complex", "build", "--graph", "cycle(3)", "--power", "2", "--out", str(path)])
    assert code == 0
    return path


def test_build_pipe_betti(monkeypatch, capsys):
    code, rep = run(["complex", "build", "--graph", "petersen", "--power", "2", "--mod", "2"])
    out = capsys.readouterr().out
    code2, rep2 = call(["complex", "betti"], out, monkeypatch)
    assert code == code2 == 0
    assert rep2["result"]["betti"] == [1, 12, 36]
    assert "<stdin>" in rep2["manifest"]["inputs"]


def test_code_gap(torus_file):
    code, rep = run(["code", "gap", "--in", str(torus_file), "--mode", "exact"])
    assert code == 0
    assert rep["result"]["gap_distance"] == 1 and rep["result"]["min_eig_bprime"] == -7


def test_code_pipeline_via_extract(torus_file, tmp_path):
    ext = tmp_path / "code.json"
    run(["code", "extract", "--in", str(torus_file), "--out", str(ext)])
    code, rep = run(["code", "params", "--in", str(ext)])
    assert rep["result"]["k"] == 2
    code, rep = run(["code", "distance", "--in", str(ext)])
    assert rep["result"]["d"] == 3
    code, rep = run(["code", "census", "--in", str(ext)])
    assert rep["result"]["achievable_count"] == 256


def test_usage_errors():
    assert main(["nonsense"]) == 2
    assert main(["complex", "build", "--bogus-flag"]) == 2
    assert main(["code", "params", "--in", "/nonexistent/file.json"]) == 2


def test_check_failure_exit_code():
    # the toric expectation criterion fails on a closed torus, which is a check failure
    code, rep = run(["verify", "all", "--only", "8"])
    assert code == 1 and not rep["ok"]
    validate(rep, "report")


def test_empty_input_is_usage_error(monkeypatch):
    code, _ = call(["complex", "betti"], "", monkeypatch)
    assert code == 2


def test_manifest_reproducible(torus_file):
    _, a = run(["toric", "ratio", "--in", str(torus_file), "--seed", "4"])
    _, b = run(["toric", "ratio", "--in", str(torus_file), "--seed", "4"])
    assert a["digest"] == b["digest"]
    strip = lambda r: {**r, "manifest": {k: v for k, v in r["manifest"].items() if k != "timings"}}
    assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)
    _, c = run(["toric", "ratio", "--in", str(torus_file), "--seed", "5"])
    assert c["digest"] != a["digest"]


def test_formats(torus_file, capsys):
    run(["code", "census", "--in", str(torus_file), "--format", "csv"])
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "key,value" and "achievable_count,256" in out
    run(["code", "census", "--in", str(torus_file), "--format", "text"])
    assert "achievable_count: 256" in capsys.readouterr().out


def test_thermal_csv_rows(capsys, tmp_path):
    path = tmp_path / "r.json"
    run(["complex", "build", "--random", "3,8,3", "--mod", "2", "--out", str(path)])
    code, _ = run(["stat", "thermal", "--in", str(path), "--brute", "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0 and lines[0].startswith("beta,energy,per_term") and len(lines) == 6


@pytest.mark.parametrize("argv", [
    ["graph", "gen", "--name", "petersen"],
    ["graph", "girth", "--graph", "petersen"],
    ["graph", "expansion", "--graph", "k4"],
    ["stat", "ising-verify", "--graph", "petersen"],
    ["stat", "checkerboard", "--L", "6", "--l", "2", "--samples", "20000"],
    ["code", "entropy-bound", "--Np", "36", "--b2", "9", "--eps", "0.01"],
])
def test_standalone_commands(argv):
    code, rep = run(argv)
    assert code == 0 and rep["ok"]
    validate(rep, "report")


def test_complex_commands(torus_file, tmp_path):
    for argv in (["complex", "power", "--k", "1"], ["complex", "mv-check", "--count", "3"],
                 ["complex", "delete", "--cells", "[0]"], ["toric", "wilson"],
                 ["sim", "disentangle"], ["sim", "expect", "--dense"]):
        code, rep = run(argv + ["--in", str(torus_file)])
        assert code == 0, argv
        validate(rep, "report")
    code, rep = run(["complex", "product", "--in", str(torus_file), "--other", str(torus_file)])
    assert rep["result"]["dims"] == [81, 324, 486, 324, 81]


def test_toric_defect(tmp_path):
    path = tmp_path / "p2.json"
    run(["complex", "build", "--graph", "petersen", "--power", "2", "--out", str(path)])
    code, rep = run(["toric", "defect", "--in", str(path), "--plaquette", "3"])
    assert code == 0 and rep["result"]["product_matches"] and rep["result"]["same_pattern"]


def test_sim_canon_refuses_redundant(torus_file):
    code, _ = run(["sim", "canon", "--in", str(torus_file)])
    assert code == 2


def test_verify_subset():
    code, rep = run(["verify", "all", "--only", "1,5"])
    assert code == 0 and [c["number"] for c in rep["result"]["criteria"]] == [1, 5]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "chaincodes.cli", "graph", "girth", "--graph", "k4",
                          "--format", "text"], capture_output=True, text=True)
    assert out.returncode == 0 and "girth: 3" in out.stdout
