import json
import subprocess
import sys

import pytest

from snnw.cli import main

TINY = ["--depth", "1", "--width", "10", "--subspace-dim", "8", "--nodes", "8x4", "--n-max", "15",
        "--drm-epochs", "15"]


def test_run_writes_result(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["run", "--problem", "anisotropic", "--variant", "p", "--k-ratio", "1e6", *TINY, "--out", str(out),
               "--dump-system", str(tmp_path / "s.json"), "--dump-pointwise", str(tmp_path / "u.csv"),
               "--log", str(tmp_path / "log.csv")])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert rec["schema"] == "snnw-result/1"
    assert rec["problem_params"] == {"k1": 1.0, "k2": 1e6}
    assert rec["config"]["nodes"] == [8, 4]
    assert (tmp_path / "s.json").exists() and (tmp_path / "log.csv").exists()
    assert "rel_l2" in capsys.readouterr().out


def test_run_is_byte_identical_apart_from_timing(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        main(["run", "--problem", "helmholtz", "--variant", "g", *TINY, "--out", str(p)])
    a, b = (json.loads(p.read_text()) for p in paths)
    for rec in (a, b):
        for k in ("train_seconds", "assemble_seconds", "solve_seconds"):
            rec.pop(k)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_sweep(tmp_path, capsys):
    spec = {"problem": "helmholtz", "variant": "r", "rows": [1, 2], "M": [4, 6], "row_kind": "depth",
            "config": {"width": 8, "drm_epochs": 10, "nodes": "6x4"}}
    (tmp_path / "sweep.json").write_text(json.dumps(spec))
    rc = main(["sweep", "--spec", str(tmp_path / "sweep.json"), "--out", str(tmp_path / "t.csv")])
    assert rc == 0
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "depth,metric,M=4,M=6" and len(lines) == 5


def test_sweep_spec_errors(tmp_path, capsys):
    (tmp_path / "bad.json").write_text(json.dumps({"problem": "helmholtz"}))
    assert main(["sweep", "--spec", str(tmp_path / "bad.json"), "--out", str(tmp_path / "t.csv")]) == 2
    assert "missing keys" in capsys.readouterr().err


def test_bad_arguments_exit_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--problem", "heat", "--variant", "p"])
    assert exc.value.code != 0


def test_check_entry_point():
    proc = subprocess.run([sys.executable, "-m", "snnw.cli", "check"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.count("[PASS]") == 5
