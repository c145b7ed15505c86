import json
import subprocess
import sys

import numpy as np
import pytest

from steinersym import cli, geom
from steinersym.geom import Polygon


def run(*argv):
    return cli.main([str(a) for a in argv])


def write_poly(path, p):
    path.write_text(json.dumps({"vertices": p.vertices.tolist()}))
    return path


def test_steiner_square_exit_zero(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run("symmetrize", "--fixture", "square_axis", "--out", out) == cli.EXIT_OK
    text = capsys.readouterr().out
    line = next(l for l in text.splitlines() if l.startswith("area"))
    assert abs(float(line.split("delta")[1])) < 1e-9
    q = cli.load_polygon(str(out))
    assert geom.area(q) == pytest.approx(4.0)
    assert (tmp_path / "s.svg").read_text().startswith("<svg")


def test_exp_tall_rectangle_exit_three(tmp_path):
    f = write_poly(tmp_path / "tall.json", Polygon.rectangle(0, 0, 1, 7))
    assert run("symmetrize", f, "--mode", "exp", "--out", tmp_path / "e.json") == cli.EXIT_PRECONDITION


def test_half_disk_circular_svg(tmp_path):
    out = tmp_path / "c.json"
    assert run("symmetrize", "--fixture", "half_disk", "--mode", "circular", "--out", out) == 0
    before = geom.area(cli.resolve_polygon(type("A", (), {"input": None, "fixture": "half_disk"})())[1])
    after = geom.area(cli.load_polygon(str(out)))
    assert abs(after - before) / before < 1e-2
    assert (tmp_path / "c.svg").exists()


def test_bad_inputs_exit_two(tmp_path):
    assert run("symmetrize", tmp_path / "missing.json") == cli.EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("[[0, 0], [1, 1], [1, 0], [0, 1]]")
    assert run("symmetrize", bad) == cli.EXIT_INPUT
    bad.write_text("{not json")
    assert run("map", bad) == cli.EXIT_INPUT
    assert run("verify", "--fixtures", "nope", "--out", tmp_path / "v") == cli.EXIT_INPUT


def test_list_form_accepted(tmp_path):
    f = tmp_path / "sq.json"
    f.write_text("[[-1, -1], [1, -1], [1, 1], [-1, 1]]")
    assert geom.area(cli.load_polygon(str(f))) == 4.0


def test_map_and_means(tmp_path, capsys):
    f = write_poly(tmp_path / "d.json", Polygon.from_complex(np.array([1, 1j, -1, -1j])))
    assert run("map", f, "--out", tmp_path / "m.json") == 0
    assert "f'(0) = 0.7627" in capsys.readouterr().out
    assert run("means", f, "--r", "0.5,0.9", "--p", "2,inf", "--out", tmp_path / "m.csv") == 0
    rows = (tmp_path / "m.csv").read_text().splitlines()
    assert rows[0] == "r,p,mean,error,nodes" and len(rows) == 5


def test_deform_disk_one_step(tmp_path):
    f = write_poly(tmp_path / "disk.json", Polygon.regular(256, 1.0))
    out = tmp_path / "run"
    assert run("deform", f, "--alpha", 3.0, "--out", out, "--svg") == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["converged"] and s["steps"] == 1 and s["verdict"] == "converged"
    assert s["product_bound_status"] == "pass"
    assert len((out / "telemetry.jsonl").read_text().splitlines()) == 1
    assert (out / "filmstrip.svg").exists()


def test_verify_norms_linear_sharp(tmp_path):
    out = tmp_path / "v"
    assert run("verify", "--suite", "norms", "--fixtures", "alpha_z", "--out", out) == 0
    csv = (out / "verdicts.csv").read_text().splitlines()
    sharp = [l for l in csv if l.endswith(",sharp")]
    assert sharp and all("p=2.0" in l for l in sharp)


def test_verify_replay_identical(tmp_path, capsys):
    out = tmp_path / "v"
    args = ("--suite", "perimeter", "--fixtures", "square_axis,triangle,finger", "--out", out)
    assert run("verify", *args) == 0
    rec = out / "runrecord.json"
    r = json.loads(rec.read_text())
    assert {"config", "fixture_hashes", "verdicts_sha256"} <= set(r)
    assert run("report", rec, "--replay", tmp_path / "again") == 0
    assert "replay identical" in capsys.readouterr().out
    assert (tmp_path / "again" / "verdicts.csv").read_bytes() == (out / "verdicts.csv").read_bytes()


def test_replay_detects_tampering(tmp_path):
    out = tmp_path / "v"
    assert run("verify", "--suite", "perimeter", "--fixtures", "square_axis", "--out", out) == 0
    rec = out / "runrecord.json"
    r = json.loads(rec.read_text())
    r["verdicts_sha256"] = "0" * 64
    rec.write_text(json.dumps(r))
    assert run("report", rec, "--replay", tmp_path / "again") == 1


def test_search_p0_symmetric(tmp_path, capsys):
    out = tmp_path / "p"
    assert run("search-p0", "--fixture", "square_axis", "--pmax", 50, "--out", out) == 0
    assert "no violation <= 50" in capsys.readouterr().out
    agg = json.loads((out / "p0_summary.json").read_text())
    assert agg["upper"] is None and agg["lower"] == 2.0


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "steinersym.cli", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("symmetrize", "map", "means", "deform", "verify", "search-p0", "report"):
        assert cmd in res.stdout
