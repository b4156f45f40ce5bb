import csv
import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from scalarflat import catalog
from scalarflat.cli import GridSpec, main
from scalarflat.errors import InputError
from scalarflat.momentum import match_outline
from scalarflat.polygon import load_polygon

QUARTER = {"vertices": [[0, 0]], "labels": [1.4142135623730951, 1.4142135623730951], "rays": [[1, 0], [0, 1]]}
LEBRUN = {"vertices": [[0.5, -0.5], [0.5, 0.5]], "labels": [0.7071067811865476, 0.3333333333333333, 0.7071067811865476],
          "rays": [[1, -1], [1, 1]]}
HALF = {"class": "half_plane", "base": [0, 0], "direction": [1, 0], "labels": [1]}
STRIP = {"class": "strip", "base": [0, 0], "direction": [1, 0], "width": 1, "labels": [1, 1]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, data in (("quarter", QUARTER), ("lebrun", LEBRUN), ("half", HALF), ("strip", STRIP)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        out[name] = str(p)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out["bad"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_classify(capsys, files):
    code, out, _ = run(capsys, "classify", files["quarter"])
    assert code == 0 and "class: General" in out and "[[1.0, 0.0], [0.0, 1.0]]" in out
    code, out, _ = run(capsys, "classify", files["lebrun"], "--json")
    rep = json.loads(out)
    L = np.array(rep["normalize"]["linear"])
    assert rep["class"] == "General" and np.allclose(L / L[0, 0], [[1, -1], [1, 1]])
    code, out, _ = run(capsys, "classify", files["strip"])
    assert code == 0 and "Strip" in out and "outline matching unsupported" in out


def test_match(capsys, files):
    code, out, _ = run(capsys, "match", files["quarter"])
    assert code == 0 and json.loads(out)["breakpoints"] == [0.0]
    code, out, _ = run(capsys, "match", files["lebrun"], "--c1", "0.5")
    rep = json.loads(out)
    assert len(rep["speeds"]) == 3 and rep["variation"]["c1"] == 0.5
    assert run(capsys, "match", files["quarter"], "--c1", "-1")[0] == 2
    assert run(capsys, "match", files["strip"])[0] == 3
    assert run(capsys, "match", files["bad"])[0] == 2
    assert run(capsys, "match", files["quarter"] + ".missing")[0] == 4


def test_sample_flat_model(capsys, files):
    code, out, _ = run(capsys, "sample", files["half"], "--grid", "0:1:0.5:1.5:3:3")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 9
    assert all(float(r["lambda"]) == 1.0 for r in rows)
    assert all(float(r["V"]) == float(r["y"]) ** 2 for r in rows)
    assert all(r["K"] == "0" for r in rows)


def test_sample_taub_nut(capsys):
    code, out, _ = run(capsys, "sample", "--catalog", "taub_nut", "--k", "0", "--grid=-1:1:0.5:1:3:2")
    row = next(r for r in read_csv(out) if r["x"] == "0" and r["y"] == "1")
    assert float(row["K"]) == pytest.approx(-1 / 27, abs=1e-6)
    assert float(row["lambda"]) == pytest.approx(3.0, abs=1e-12)


def test_sample_refuses_k_near_boundary(capsys, files):
    code, out, _ = run(capsys, "sample", files["quarter"], "--grid=-1:1:0.001:1:3:3")
    rows = read_csv(out)
    assert [r["K"] for r in rows if r["y"] == "0.001"] == ["", "", ""]
    assert all(r["K"] != "" for r in rows if r["y"] != "0.001")


@pytest.mark.parametrize("grid", ["0:1:0:1:3:3", "0:1:0.1:1:1:3", "1:0:0.1:1:3:3", "0:1:0.1", "a:1:0.1:1:3:3"])
def test_bad_grid(capsys, files, grid):
    assert run(capsys, "sample", files["quarter"], f"--grid={grid}")[0] == 2
    with pytest.raises(InputError):
        GridSpec.parse(grid)


def test_csv_round_trip(capsys, files, tmp_path):
    out = tmp_path / "s.csv"
    h = 1e-3
    code, _, _ = run(capsys, "sample", files["lebrun"], f"--grid=0.3:{0.3 + 2 * h}:0.7:{0.7 + 2 * h}:3:3", "--out", str(out))
    assert code == 0
    rows = read_csv(out.read_text())
    mm = match_outline(load_polygon(files["lebrun"]))
    for r in rows:
        x, y = float(r["x"]), float(r["y"])
        assert (float(r["phi1"]), float(r["phi2"])) == mm.value(x, y)
    # five-point residual of the stored values at the centre node
    val = {(round(float(r["x"]) / h), round(float(r["y"]) / h)): (float(r["phi1"]), float(r["phi2"])) for r in rows}
    (cx, cy) = (round(0.3 / h) + 1, round(0.7 / h) + 1)
    y = cy * h
    for i in range(2):
        f = lambda a, b: val[(cx + a, cy + b)][i]
        lap = (f(1, 0) + f(-1, 0) + f(0, 1) + f(0, -1) - 4 * f(0, 0)) / h**2
        assert abs(y * lap - (f(0, 1) - f(0, -1)) / (2 * h)) <= 1e-5


def test_verify(capsys, files):
    code, out, _ = run(capsys, "verify", "--catalog", "taub_nut", "--k", "0")
    assert code == 0 and out.strip().endswith("PASS")
    code, out, _ = run(capsys, "verify", "--catalog", "lipschitz_pathology", "--json")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", files["lebrun"], "--points", "200", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["class"] == "General"
    assert run(capsys, "verify", files["quarter"], "--c1", "0.7")[0] == 0
    assert run(capsys, "verify", files["bad"])[0] == 2
    assert run(capsys, "verify", files["strip"])[0] == 3
    assert run(capsys, "verify")[0] == 2


def test_verify_failure_exit_code(capsys, files):
    # a tolerance no floating-point residual can meet
    assert run(capsys, "verify", files["lebrun"], "--points", "50", "--tol", "0")[0] == 1


def test_render(capsys, files, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for p in (a, b):
        code, _, _ = run(capsys, "render", files["lebrun"], "--heatmap", "K", "--grid=-2:2:0.1:2:6:6", "--out", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    svg = a.read_text()
    assert svg.startswith("<svg") and svg.count(">s=") == 3 and "<path" in svg
    code, out, _ = run(capsys, "render", files["quarter"])
    assert code == 0 and out.count(">s=1.41421") == 2
    code, out, _ = run(capsys, "render", "--catalog", "taub_nut", "--heatmap", "lambda")
    assert code == 0 and "lambda: min" in out


def test_render_io_error(capsys, files, tmp_path):
    target = tmp_path / "missing_dir" / "x.svg"
    assert run(capsys, "render", files["quarter"], "--out", str(target))[0] == 4


def test_render_no_momentum(capsys):
    assert run(capsys, "render", "--catalog", "disk_nonpolygon")[0] == 3


def test_catalog_commands(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and [e["id"] for e in json.loads(out)] == catalog.ids()
    code, out, _ = run(capsys, "catalog", "show", "lebrun_ok", "--k", "3")
    assert code == 0 and json.loads(out)["params"] == {"k": 3}
    assert run(capsys, "catalog", "show", "unknown")[0] == 2
    assert run(capsys, "catalog", "show")[0] == 2


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "scalarflat", "classify", files["quarter"]], capture_output=True, text=True)
    assert proc.returncode == 0 and "General" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "scalarflat", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
