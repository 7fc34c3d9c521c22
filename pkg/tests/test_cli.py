import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from relscott.cli import atomic_write, dumps, main

GOLDEN = Path(__file__).parent / "data" / "golden"
CFG = GOLDEN / "reference.cfg"


def same(a, b, rel=1e-9, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and set(a) == set(b), path
        for k in a:
            same(a[k], b[k], rel, f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            same(x, y, rel, f"{path}[{i}]")
    elif isinstance(a, float) and not isinstance(b, bool):
        assert b == pytest.approx(a, rel=rel, abs=1e-300), path
    else:
        assert a == b, path


def run(tmp_path, *argv, config=CFG):
    pre = ["--config", str(config)] if config else []
    return main([*pre, "--out-dir", str(tmp_path), *argv])


@pytest.mark.parametrize("name,argv", [
    ("bounds.json", ["bounds"]),
    ("validation.json", ["validate"]),
    ("energy_breakdown.json", ["assemble", "--scott-table", str(GOLDEN / "scott_table.csv"), "--points", "801"]),
])
def test_golden_outputs(tmp_path, name, argv, capsys):
    assert run(tmp_path, *argv) == 0
    got = json.loads((tmp_path / name).read_text())
    same(json.loads((GOLDEN / name).read_text()), got)
    # stdout carries the same document
    assert json.loads(capsys.readouterr().out) == got


def test_golden_breakdown_identity():
    br = json.loads((GOLDEN / "energy_breakdown.json").read_text())
    assert br["total"] == br["E_TF"] + br["scott_sum"] + br["dirac"] + br["schwinger"] + br["rct"]
    assert all(p["interpolated"] for p in br["provenance"])


def test_validation_failure_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("Z = [100]\nY = [[0, 0, 0]]\nN = 100\nbeta = 0.01\n")
    assert run(tmp_path, "validate", config=bad) == 2
    assert json.loads((tmp_path / "validation.json").read_text())["passed"] is False


def test_malformed_config_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("Z = [1, 2]\nY = [[0, 0, 0]]\nN = 3\n")
    assert run(tmp_path, "bounds", config=bad) == 2


def test_nonconvergence_exit_code(tmp_path):
    code = run(tmp_path, "scott", "--Z", "1", "--beta", "0", "--rmax", "16", "--nradii", "3",
               "--Lmax", "2", "--box", "60", "--nodes", "300", config=None)
    assert code == 3


def test_missing_scott_entry_is_validation_error(tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("kappa_arg,beta_arg,S,err\n0.0,0.0,0.25,0\n")
    assert run(tmp_path, "assemble", "--scott-table", str(table), "--points", "401") == 2


def test_phase_space_dump(tmp_path):
    assert run(tmp_path, "phase-space", "dump", "--law", "rel", "--gamma", "0.1", "--n", "7", config=None) == 0
    lines = (tmp_path / "phase_space.csv").read_text().splitlines()
    assert lines[0] == "w,density,pressure" and len(lines) == 8


def test_tf_subcommand(tmp_path):
    assert run(tmp_path, "tf", "--Z", "2", "--points", "801", config=None) == 0
    out = json.loads((tmp_path / "tf_energy.json").read_text())
    assert out["energy"] < 0 and abs(out["electrons"] - 2) < 1e-6


def test_ltcheck_against_baseline(tmp_path):
    base = tmp_path / "base.json"
    base.write_text(json.dumps({"plain": {"max_ratio": 1e-9}}))
    assert run(tmp_path, "ltcheck", "--variant", "plain", "--samples", "2", "--baseline", str(base), config=None) == 1
    assert run(tmp_path, "ltcheck", "--variant", "plain", "--samples", "2",
               "--baseline", str(Path(__file__).parent / "data" / "ltlab_baseline.json"), config=None) == 0
    assert len((tmp_path / "ltcheck_plain.csv").read_text().splitlines()) == 3


def test_sgf_subcommand(tmp_path):
    assert run(tmp_path, "sgf", "--lattice", "3", "--kappa", "0.1", "--init-amplitude", "0.1", "--max-iter", "200", config=None) == 0
    s = json.loads((tmp_path / "sgf_summary.json").read_text())
    assert s["converged"] and s["residual"] <= 1e-6


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "x.json"
    atomic_write(target, "old")

    with pytest.raises(TypeError):
        atomic_write(target, 123)  # write fails mid-way
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["x.json"]


def test_dumps_encodes_nonfinite():
    out = json.loads(dumps({"a": math.inf, "b": [math.nan, 1.0]}))
    assert out == {"a": "inf", "b": ["nan", 1.0]}


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "relscott.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "ltcheck" in r.stdout
