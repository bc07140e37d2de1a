import json
import subprocess
import sys

import numpy as np
import pytest

from vortexsym import schemas
from vortexsym.cli import main
from vortexsym.dynamics import platonic_solid, trajectory_csv


def _files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_equilibria_dihedral(tmp_path, capsys):
    assert main(["equilibria", "--group", "Dn", "--n", "2", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "1.2247448714" in text and "0.5773502692" in text
    doc = json.loads((tmp_path / "catalog.json").read_text())
    schemas.validate(doc, schemas.CATALOG)
    assert doc["roots"]["lambda_a"] == pytest.approx(np.sqrt(1.5), abs=1e-12)
    assert (tmp_path / "catalog.txt").read_text() == text


def test_equilibria_tetrahedral_cube(tmp_path, capsys):
    assert main(["equilibria", "--group", "T", "--fixed", "cube", "--out", str(tmp_path)]) == 0
    assert "0.21228" in capsys.readouterr().out
    doc = json.loads((tmp_path / "catalog.json").read_text())
    assert doc["n_vortices"] == 20
    assert doc["roots"]["alpha"] == pytest.approx(0.21228, abs=1e-4)


@pytest.mark.parametrize("argv", [
    ["equilibria", "--group", "Dn"],
    ["equilibria", "--group", "Dn", "--n", "1"],
    ["equilibria", "--group", "T", "--fixed", "poles"],
    ["equilibria", "--group", "Dn", "--n", "3", "--fixed", "cube"],
    ["equilibria", "--group", "Q"],
    ["portrait", "--grid", "4by4"],
    ["portrait", "--tspan", "-1"],
    ["verify", "--seed", "-3"],
    ["orbit", "--group", "Dn", "--n", "3"],
    ["orbit", "--group", "Dn", "--n", "3", "--center", "prism"],
    ["simulate"],
    [],
])
def test_usage_errors(tmp_path, argv, capsys):
    assert main(argv + ["--out", str(tmp_path)] if argv else argv) == 2
    assert not any(tmp_path.iterdir())


def test_config_file_merges_under_flags(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"group": "Dn", "n": 5, "fixed": "poles"}))
    out = tmp_path / "out"
    assert main(["equilibria", "--config", str(cfg), "--n", "3", "--out", str(out)]) == 0
    doc = json.loads((out / "catalog.json").read_text())
    assert doc["scheme"] == {"group": "Dn", "n": 3, "fixed": "poles"}


@pytest.mark.parametrize("content", ['{"group": "Dn", "n": 2, "colour": "red"}', '{"n": "two"}', "[1, 2]", "{"])
def test_bad_config_rejected(tmp_path, content, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(content)
    assert main(["equilibria", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 2
    assert not (tmp_path / "out").exists()


def test_portrait_smoke(tmp_path, capsys):
    assert main(["portrait", "--grid", "4x4", "--tspan", "1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "portrait.json").read_text())
    schemas.validate(doc, schemas.PORTRAIT)
    assert len(doc["trajectories"]) == 16
    for entry in doc["trajectories"]:
        lines = (tmp_path / "trajectories" / entry["file"]).read_text().splitlines()
        assert len(lines) == entry["n_points"] + 1
    svg_text = (tmp_path / "portrait.svg").read_text()
    assert svg_text.startswith("<svg") and 'viewBox="0 0 1000 1000"' in svg_text


def test_simulate_tetrahedron(tmp_path, capsys):
    src = tmp_path / "tetra.csv"
    src.write_text("\n".join(",".join(repr(float(x)) for x in row) for row in platonic_solid("tetrahedron")) + "\n")
    out = tmp_path / "out"
    assert main(["simulate", "--input", str(src), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["max_position_drift"] <= 1e-9
    assert report["t_end"] == 10.0


def test_simulate_symmetric_start(tmp_path, capsys):
    assert main(["simulate", "--group", "Dn", "--n", "3", "--u0", "0.3,0.4,0.5", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["relative_energy_drift"] <= 1e-8
    assert report["scheme"]["n"] == 3
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,")


@pytest.mark.parametrize("content", ["1,2\n", "a,b,c\n", "1,0,0\n", "1,0,0\n1,0,0\n", ""])
def test_simulate_malformed_csv(tmp_path, content, capsys):
    src = tmp_path / "bad.csv"
    src.write_text(content)
    assert main(["simulate", "--input", str(src), "--out", str(tmp_path / "out")]) == 2
    assert not (tmp_path / "out").exists()


def test_simulate_missing_file(tmp_path, capsys):
    assert main(["simulate", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2


def test_orbit_from_centre(tmp_path, capsys):
    assert main(["orbit", "--group", "Dn", "--n", "3", "--center", "anti-prism", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "orbits.json").read_text())
    schemas.validate(doc, schemas.ORBIT)
    assert len(doc["orbits"]) == 3
    for entry in doc["orbits"]:
        assert entry["closure_error"] <= 1e-6
        assert (tmp_path / entry["lifted_file"]).exists()


def test_orbit_at_saddle_is_numerical_failure(tmp_path, capsys):
    from vortexsym.catalog import catalog_for
    from vortexsym.reduction import make_scheme

    s = make_scheme("Dn", 3)
    q = next(r for r in catalog_for(s) if r.kind == "saddle").point
    u0 = ",".join(repr(float(x)) for x in q)
    assert main(["orbit", "--group", "Dn", "--n", "3", "--u0", u0, "--out", str(tmp_path)]) == 3
    assert not any(tmp_path.iterdir())


def test_verify_tables(tmp_path, capsys):
    assert main(["verify", "--section", "tables", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify.txt").read_text().splitlines()
    assert len(lines) == 32 and all(": PASS (" in line for line in lines)
    schemas.validate(json.loads((tmp_path / "verify.json").read_text()), schemas.VERIFY)


def test_verify_failure_exit_code(tmp_path, monkeypatch, capsys):
    from vortexsym import verify
    from vortexsym.verify import Check

    monkeypatch.setitem(verify.SECTIONS, "tables", lambda seed=0: [Check("tables", "broken", False, 1.0, 0.0, "err")])
    assert main(["verify", "--section", "tables", "--out", str(tmp_path)]) == 1
    assert "broken: FAIL" in (tmp_path / "verify.txt").read_text()


@pytest.mark.parametrize("argv", [
    ["equilibria", "--group", "T"],
    ["portrait", "--group", "Dn", "--n", "3", "--grid", "3x3", "--tspan", "2"],
    ["simulate", "--group", "T", "--fixed", "cube", "--u0", "0.2,0.3,0.9", "--tspan", "1"],
    ["orbit", "--group", "Dn", "--n", "2", "--fixed", "poles", "--u0", "0.1,0.05,0.99", "--regularized"],
    ["verify", "--section", "identities", "--seed", "11"],
])
def test_outputs_are_byte_identical(tmp_path, argv, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == main(argv + ["--out", str(b)])
    assert _files(a) == _files(b)
    assert _files(a)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vortexsym", "equilibria", "--group", "Dn", "--n", "2",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "1.2247448714" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "vortexsym", "equilibria", "--group", "Dn"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 2
    assert "needs --n" in proc.stderr


def test_trajectory_csv_round_trip():
    from vortexsym.dynamics import read_configuration_csv

    v = platonic_solid("octahedron")
    text = "\n".join(",".join(repr(float(x)) for x in row) for row in v)
    assert np.array_equal(read_configuration_csv(text), v)
    assert trajectory_csv([0.0], v[None]).splitlines()[0].startswith("t,")
