import csv
import json
import subprocess
import sys

import pytest

from zollfrei.cli import EXIT_CONFIG, EXIT_OK, EXIT_TOL, run

GAUSS = {"kind": "gaussian_mixture", "terms": [{"c": 1, "k": 1}]}
ZERO_H = {"kind": "odd_mixture", "terms": []}
ODD = {"kind": "odd_mixture", "terms": [{"c": 1, "k": 1, "p": 1}]}


def write_config(tmp_path, body, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(body), encoding="utf-8")
    return str(path)


def invoke(tmp_path, sub, body, *extra, out="out"):
    code = run([sub, "--config", write_config(tmp_path, body), "--out", str(tmp_path / out), *extra])
    return code, tmp_path / out


def test_radon_of_gaussian(tmp_path):
    code, out = invoke(tmp_path, "radon", {"profile": GAUSS})
    assert code == EXIT_OK
    report = json.loads((out / "radon.json").read_text())
    assert report["passed"] and report["subcommand"] == "radon"
    assert {c["name"] for c in report["checks"]} == {"radon_vs_closed_form", "even_symmetry"}
    with open(out / "radon.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["mu", "f_hat"] and len(rows) == 14


def test_hilbert_involution(tmp_path):
    body = {"profile": GAUSS, "grids": {"mu": {"start": -2, "stop": 2, "count": 8}}}
    assert invoke(tmp_path, "hilbert", body)[0] == EXIT_OK


def test_invert_gaussian(tmp_path):
    body = {"profile": GAUSS, "grids": {"points": [[0.0, 0.0], [0.5, 1.0]]}}
    assert invoke(tmp_path, "invert", body)[0] == EXIT_OK


def test_curvature_of_plane_function(tmp_path):
    body = {"profile": {"kind": "plane", "name": "x1*x2"}, "settings": {"points": 4}}
    code, out = invoke(tmp_path, "curvature", body)
    assert code == EXIT_OK
    assert json.loads((out / "curvature.json").read_text())["data"]["harmonic"] is True


def test_zollfrei_scan(tmp_path):
    body = {"profile": GAUSS, "grids": {"c1": {"start": -1, "stop": 1, "count": 2}, "q1": {"start": 0, "stop": 0.5, "count": 2}}, "settings": {"fibers": 2}}
    assert invoke(tmp_path, "zollfrei", body)[0] == EXIT_OK


def test_jump_of_zero_h(tmp_path):
    body = {"profile": ZERO_H, "grids": {"s": {"start": -1, "stop": 1, "count": 4}, "A": [1.0]}}
    code, out = invoke(tmp_path, "jump", body)
    assert code == EXIT_OK
    checks = json.loads((out / "jump.json").read_text())["checks"]
    assert any(c["name"] == "jump_vanishes_for_zero_h" for c in checks)


def test_jump_of_odd_profile(tmp_path):
    body = {"profile": ODD, "grids": {"s": {"start": -1, "stop": 1, "count": 4}, "A": [1.0]}}
    assert invoke(tmp_path, "jump", body)[0] == EXIT_OK


def test_disks_and_foliation(tmp_path):
    body = {"profile": ODD, "settings": {"samples": 8}}
    assert invoke(tmp_path, "disks", body)[0] == EXIT_OK
    assert invoke(tmp_path, "foliate", body)[0] == EXIT_OK


def test_tolerance_override_fails(tmp_path):
    assert invoke(tmp_path, "radon", {"profile": GAUSS}, "--tol", "1e-20")[0] == EXIT_TOL


@pytest.mark.parametrize(
    "argv_body",
    [
        ("radon", {"profile": {"kind": "nope"}}),
        ("curvature", {"profile": ODD}),
        ("radon", {"profile": GAUSS, "format": "xml"}),
        ("radon", {"profile": GAUSS, "grids": {"mu": {"count": 1}}}),
        ("radon", {"profile": GAUSS, "quadrature": {"n": 3}}),
    ],
)
def test_configuration_errors(tmp_path, argv_body):
    sub, body = argv_body
    assert invoke(tmp_path, sub, body)[0] == EXIT_CONFIG


def test_missing_config_and_bad_arguments(tmp_path):
    assert run(["radon", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert run(["transmogrify"]) == EXIT_CONFIG
    assert run(["radon", "--tol", "-1", "--out", str(tmp_path)]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(["radon", "--config", str(bad)]) == EXIT_CONFIG


def test_output_is_deterministic(tmp_path):
    body = {"profile": GAUSS, "settings": {"points": 3}}
    invoke(tmp_path, "curvature", body, "--seed", "7", out="a")
    invoke(tmp_path, "curvature", body, "--seed", "7", out="b")
    for name in ("curvature.json", "curvature.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_format_writes_checks_table(tmp_path):
    code, out = invoke(tmp_path, "radon", {"profile": GAUSS, "format": "csv"})
    assert code == EXIT_OK
    with open(out / "radon_checks.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["name", "kind", "value", "tol", "pass"]
    assert len(rows) == 3


def test_console_entry_point(tmp_path):
    cfg = write_config(tmp_path, {"profile": GAUSS})
    proc = subprocess.run(
        [sys.executable, "-m", "zollfrei.cli", "radon", "--config", cfg, "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("radon: PASS")
