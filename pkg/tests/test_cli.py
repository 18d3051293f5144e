import csv
import hashlib
import json
import math
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from polyheis.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def digest(path) -> str:
    return hashlib.md5(Path(path).read_bytes()).hexdigest()


@pytest.mark.parametrize("vertices, kind", [
    ([[1, 0], [0, -1], [-1, 0], [0, 1]], "WrongOrientation"),
    ([[1, 0], [-1, 0]], "DegeneratePolygon"),
    ([[1, 0], [0, 1], [-1, 0], [0, -2]], "NotCentrallySymmetric"),
    ([[2, 0], [1, 0.1], [0, 1], [-2, 0], [-1, -0.1], [0, -1]], "NotConvex"),
])
def test_bad_polygons_exit_2(tmp_path, capsys, vertices, kind):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"vertices": vertices}))
    code, _, err = run(capsys, "geom", "--polygon", str(f))
    assert code == 2
    assert err.startswith(f"error kind={kind} ")


def test_input_errors(tmp_path, capsys):
    code, _, err = run(capsys, "geom", "--polygon", str(tmp_path / "missing.json"))
    assert code == 2 and "kind=InputError" in err
    code, _, err = run(capsys, "dist", "--polygon", "hexagon", "--point", "1,2")
    assert code == 2 and "kind=InputError" in err
    code, _, err = run(capsys, "horo", "eval", "--polygon", "hexagon", "--point", "0,0,0",
                       "--horo", "bogus:1")
    assert code == 2 and "kind=InputError" in err


def test_geom_matches_data_file(capsys):
    code, out, _ = run(capsys, "geom", "--polygon", str(DATA / "square.json"))
    rep = json.loads(out)
    code2, out2, _ = run(capsys, "geom", "--polygon", "square")
    assert code == code2 == 0 and out == out2
    assert rep["iso_area"] == pytest.approx(4.0)
    assert rep["iso_perimeter"] == pytest.approx(8.0)


def test_dist(tmp_path, capsys):
    code, out, _ = run(capsys, "dist", "--polygon", "hexagon", "--point", "0,0,1")
    assert code == 0 and float(out) == pytest.approx(math.sqrt(12), abs=1e-9)
    code, out, _ = run(capsys, "dist", "--polygon", "square", "--point", "0,0,1")
    assert code == 0 and float(out) == pytest.approx(4.0, abs=1e-9)
    code, out, _ = run(capsys, "dist", "--polygon", "hexagon", "--point", "0,0,0")
    assert float(out) == 0.0
    path, rep = tmp_path / "path.csv", tmp_path / "rep.json"
    code, _, _ = run(capsys, "dist", "--polygon", "hexagon", "--point", "0.4,-0.3,0.2",
                     "--path", str(path), "--report", str(rep))
    rows = list(csv.DictReader(path.open()))
    end = np.array([float(rows[-1][k]) for k in "xyz"])
    assert np.max(np.abs(end - [0.4, -0.3, 0.2])) <= 1e-6
    info = json.loads(rep.read_text())
    assert info["endpoint_error"] <= 1e-6 and info["length"] == pytest.approx(info["distance"])


def test_horo_eval_and_orbit(tmp_path, capsys):
    code, out, _ = run(capsys, "horo", "eval", "--polygon", "hexagon", "--point", "0,2,0",
                       "--horo", "psi_vee:1,0.5,0")
    assert code == 0 and float(out) == pytest.approx(-1.0)
    code, out, _ = run(capsys, "horo", "orbit", "--polygon", "hexagon", "--point", "0.5,-1,3",
                       "--horo", "norm:1,2")
    rep = json.loads(out)
    assert rep["same_class"] and not rep["busemann"]
    assert rep["image"]["w"] == pytest.approx([1.5, 1.0])


def test_atlas(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for f in (a, b):
        code, out, _ = run(capsys, "horo", "atlas", "--polygon", "hexagon", "--out", str(f))
        assert code == 0
    assert json.loads(out)["charts"] == [f"chart {i}" for i in range(1, 7)]
    assert digest(a) == digest(b)


def test_sphere_mesh(tmp_path, capsys):
    outs = []
    for k in range(2):
        obj = tmp_path / f"m{k}" / "sphere.obj"
        obj.parent.mkdir()
        code, out, _ = run(capsys, "sphere-mesh", "--polygon", "hexagon", "--samples", "3",
                           "--out", str(obj), "--report", str(obj.with_suffix(".json")))
        assert code == 0
        outs.append(obj)
    summary = json.loads(out)
    assert summary["boundary_edges"] == 0
    text = outs[0].read_text()
    groups = {line.split()[1] for line in text.splitlines() if line.startswith("g ")}
    assert sum(g.endswith("_wall") for g in groups) == 6
    assert summary["groups"] == len(groups)
    mats = {line.split()[1] for line in text.splitlines() if line.startswith("usemtl")}
    defined = {line.split()[1] for line in outs[0].with_suffix(".mtl").read_text().splitlines()
               if line.startswith("newmtl")}
    assert mats <= defined
    assert digest(outs[0]) == digest(outs[1])
    assert outs[0].with_suffix(".png").exists()
    code, _, err = run(capsys, "sphere-mesh", "--polygon", "hexagon", "--samples", "1",
                       "--out", str(tmp_path / "x.obj"))
    assert code == 2


@pytest.mark.parametrize("suite", ["eikonal", "action"])
def test_verify_reports_are_byte_stable(tmp_path, capsys, suite):
    reports = []
    for k in range(2):
        rep = tmp_path / f"r{k}.json"
        code, out, _ = run(capsys, "verify", suite, "--polygon", "square", "--samples", "100",
                           "--out", str(tmp_path / f"r{k}.csv"), "--report", str(rep))
        assert code == 0 and out.strip() == f"{suite}: PASS"
        reports.append(rep)
    assert digest(reports[0]) == digest(reports[1])
    assert json.loads(reports[0].read_text())["passed"] is True
    assert (tmp_path / f"r0_{suite}.png").exists()


def test_verify_failure_exits_1(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "vertical", "--polygon", "hexagon", "--samples", "2",
                       "--eps-schedule", "100,1000")
    assert code == 1 and "vertical: FAIL" in out


@pytest.mark.skipif(shutil.which("polyheis") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["polyheis", "dist", "--polygon", "hexagon", "--point", "0,0,1"],
                         capture_output=True, text=True, check=True)
    assert float(res.stdout) == pytest.approx(math.sqrt(12), abs=1e-9)
