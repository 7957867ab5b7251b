import json
import subprocess
import sys

import pytest

from sqrect import cli
from sqrect.grid import rectangle
from sqrect.shapes import d1_ell, fig1_dumbbell
from sqrect.solver import MaxIterationsExceeded


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fig1_file(tmp_path):
    p = tmp_path / "fig1.json"
    p.write_text(fig1_dumbbell().dumps())
    return p


def test_solve_rectangle(tmp_path, capsys):
    p = tmp_path / "rect.json"
    p.write_text(rectangle(2, 3).dumps())
    code, out, _ = run(capsys, "solve", p, "--exact")
    doc = json.loads(out)
    assert code == 0
    assert doc["modulus"] == pytest.approx(2 / 3, abs=1e-12)
    assert doc["modulus_exact"] == "2/3"
    assert doc["layout_report"]["passed"]
    code, out, _ = run(capsys, "solve", p, "--normalize", "integer")
    assert code == 0 and {w["w_exact"] for w in json.loads(out)["weights"]} == {"1"}


def test_solve_fig1_bar_is_constant(fig1_file, tmp_path, capsys):
    svg = tmp_path / "fig1.svg"
    code, out, _ = run(capsys, "solve", fig1_file, "--svg", svg)
    doc = json.loads(out)
    assert code == 0 and svg.read_text().startswith("<?xml")
    bar = [w["w"] for w in doc["weights"] if w["tile"][1] == 0 and 0 <= w["tile"][0] < 8]
    assert len(bar) == 8
    assert max(bar) - min(bar) <= 1e-7 * doc["height"]
    assert doc["uniformity"]["passed"]


def test_malformed_input_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(capsys, "solve", p)[0] == 2
    p.write_text(json.dumps({"bar": {"origin": [0, 0], "width": 5, "height": 1}}))
    assert run(capsys, "solve", p)[0] == 2
    assert run(capsys, "solve", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "subdivide", p, "--level", "-1")[0] == 2


def test_non_convergence_exits_3(fig1_file, capsys, monkeypatch):
    def give_up(*a, **k):
        raise MaxIterationsExceeded("iteration limit reached")

    monkeypatch.setattr(cli, "solve_optimal", give_up)
    assert run(capsys, "solve", fig1_file)[0] == 3
    assert run(capsys, "verify-dumbbell", fig1_file)[0] == 3


def test_subdivide(tmp_path, capsys):
    p = tmp_path / "d1.json"
    p.write_text(d1_ell().dumps())
    code, out, _ = run(capsys, "subdivide", p, "--level", 0)
    assert code == 0 and len(json.loads(out)["tiles"]) == 3
    code, out, _ = run(capsys, "subdivide", p, "--level", 1)
    assert len(json.loads(out)["tiles"]) == 12
    code, out, _ = run(capsys, "subdivide", p, "--level", 3)
    assert len(json.loads(out)["tiles"]) == 192


def test_verify_dumbbell(fig1_file, tmp_path, capsys):
    code, out, _ = run(capsys, "verify-dumbbell", fig1_file)
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and len(doc["qualifying_tiles"]) == 4
    plain = tmp_path / "plain.json"
    plain.write_text(json.dumps({"bar": {"origin": [0, 0], "width": 6, "height": 1}}))
    code, out, _ = run(capsys, "verify-dumbbell", plain)
    assert code == 0 and len(json.loads(out)["qualifying_tiles"]) == 6
    rect = tmp_path / "rect.json"
    rect.write_text(rectangle(2, 2).dumps())
    assert run(capsys, "verify-dumbbell", rect)[0] == 2


def test_verify_rejects_non_optimal_weights(fig1_file, tmp_path, capsys):
    code, out, _ = run(capsys, "solve", fig1_file)
    doc = json.loads(out)
    for w in doc["weights"]:
        if w["tile"] == [3, 0]:
            w["w"] *= 1.5
    bad = tmp_path / "weights.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify-dumbbell", fig1_file, "--weights", bad)
    assert code == 1 and [3, 0] in json.loads(out)["violating_tiles"]
    bad.write_text(json.dumps({"weights": [{"tile": [0, 0]}]}))
    assert run(capsys, "verify-dumbbell", fig1_file, "--weights", bad)[0] == 2


def test_phi_commands(capsys):
    code, out, _ = run(capsys, "phi", "apply", "[1,0,0]")
    assert code == 0 and json.loads(out)["y"] == ["1/2", "1/2", "0"]
    code, out, _ = run(capsys, "phi", "mu", "0,0,1")
    assert json.loads(out)["mu"] == 2
    code, out, _ = run(capsys, "phi", "iterate", "1,0,0", "--m", 2)
    assert json.loads(out)["y"] == ["1/3", "1/3", "1/3"]
    code, out, _ = run(capsys, "phi", "preimage", "1,0")
    assert code == 2 and json.loads(out)["error"] == "NotInImage"
    code, out, _ = run(capsys, "phi", "extend", "1,0,0", "--m", 3)
    assert json.loads(out)["columns"][1] == ["1/2", "1/2", "0"]
    assert run(capsys, "phi", "apply", "1,-1")[0] == 2
    assert run(capsys, "phi", "apply", "x")[0] == 2


def test_output_is_deterministic(fig1_file, tmp_path, capsys):
    outs = []
    for k in range(2):
        target = tmp_path / f"out{k}.json"
        assert run(capsys, "solve", fig1_file, "--level", 1, "--exact", "--json", target)[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    a = run(capsys, "fixture", "random-dumbbell", "--seed", 7)[1]
    b = run(capsys, "fixture", "random-dumbbell", "--seed", 7)[1]
    assert a == b


def test_gallery(tmp_path, capsys):
    code, out, _ = run(capsys, "gallery", tmp_path, "--levels", 1)
    doc = json.loads(out)
    assert code == 0
    assert [(e["fixture"], e["level"]) for e in doc] == [("d1", 0), ("fig1", 1), ("fig7", 1)]
    assert all(e["layout_ok"] for e in doc)
    assert sorted(p.name for p in tmp_path.glob("*.svg")) == ["d1_level0.svg", "fig1_level1.svg", "fig7_level1.svg"]


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "sqrect.cli", "phi", "apply", "1,0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["y"] == ["1/2", "1/2"]
