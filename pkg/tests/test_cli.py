import json
import subprocess
import sys

import pytest

from spacelike import svg
from spacelike.cli import main

import numpy as np


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_solve_affine_disc(tmp_path):
    assert run(tmp_path, "solve", "--domain", "disc", "--h", "0.02", "--boundary", "affine", "0.2", "0.1", "0.05") == 0
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert rep["converged"] and rep["iterations"] <= 3
    assert (tmp_path / "solution.csv").read_text().startswith("x1,x2,u,class\n")


def test_verify_helicoid_sample(tmp_path, capsys):
    assert run(tmp_path, "verify", "--surface", "helicoid", "--domain", "sector", "--h", "0.025") == 0
    out = json.loads((tmp_path / "verify.json").read_text())
    assert out["all_hold"] and len(out["checks"]) == 5
    assert "levelcurve_inequality" in capsys.readouterr().out


def test_verify_hyperboloid_refused(tmp_path):
    assert run(tmp_path, "verify", "--surface", "hyperboloid", "--domain", "disc") == 1
    assert "refused" in json.loads((tmp_path / "verify.json").read_text())


def test_verify_failing_check_exits_3(tmp_path):
    # the boundary layer at margin 0 is a genuine (discretization) failure of one check
    code = run(tmp_path, "verify", "--domain", "sector", "--h", "0.025", "--margin", "0",
               "--boundary", "file", str(_tilted_field(tmp_path)))
    assert code == 3


def _tilted_field(tmp_path):
    from spacelike import field as F

    mask = F.DomainMask.from_shape(F.sector(), 0.025)
    X, Y = mask.coords()
    path = tmp_path / "data.csv"
    F.GridField(mask, np.arctan2(Y, X) + 0.1 * X).to_csv(path)
    return path


def test_not_converged_exits_2(tmp_path):
    assert run(tmp_path, "solve", "--domain", "sector", "--boundary", "surface", "helicoid", "--max-iter", "1") == 2
    assert not json.loads((tmp_path / "solve_report.json").read_text())["converged"]


def test_solve_verify_flag(tmp_path):
    assert run(tmp_path, "solve", "--domain", "sector", "--boundary", "surface", "helicoid", "--verify") == 0
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert rep["verification"]["all_hold"]


@pytest.mark.parametrize(
    "args",
    [
        ["bogus"],
        ["solve", "--domain", "disc"],
        ["solve", "--domain", "disc", "--boundary", "affine", "1"],
        ["solve", "--domain", "disc", "--boundary", "affine", "1", "0", "0"],
        ["curvature", "--surface", "catenoid"],
        ["curvature", "--surface", "helicoid", "--domain", "annulus"],
        ["curvature", "--surface", "plane", "--h", "1.5"],
        ["curvature", "--surface", "plane", "--h", "-1"],
        ["catalog", "--surface", "helicoid", "--points", "0.5,0"],
        ["catalog", "--surface", "helicoid", "--points", "1;2"],
    ],
)
def test_usage_errors(tmp_path, args):
    assert run(tmp_path, *args) == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\ndomain = sector\nh = 0.1\nboundary = surface helicoid\nmax_iter = 1\n")
    assert run(tmp_path, "solve", "--config", str(cfg)) == 2
    assert run(tmp_path, "solve", "--config", str(cfg), "--max-iter", "20", "--h", "0.05") == 0
    lines = (tmp_path / "solution.csv").read_text().splitlines()
    assert float(lines[2].split(",")[1]) - float(lines[1].split(",")[1]) == pytest.approx(0.05)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(tmp_path, "solve", "--config", str(bad)) == 1


def test_curvature_and_svg(tmp_path):
    assert run(tmp_path, "curvature", "--surface", "helicoid", "--domain", "sector", "--h", "0.1", "--svg") == 0
    assert (tmp_path / "curvature.csv").exists()
    text = (tmp_path / "K_R.svg").read_text()
    assert text.startswith("<svg") and "max " in text and "min " in text


def test_catalog_output(tmp_path, capsys):
    assert main(["catalog"]) == 0
    assert "helicoid" in capsys.readouterr().out
    assert run(tmp_path, "catalog", "--surface", "hyperboloid", "--points", "1,0;0,2") == 0
    out = json.loads((tmp_path / "catalog.json").read_text())
    p = out["points"][0]
    assert p["known"]["H_L"] == 1.0 and abs(p["computed"]["H_L"] - 1) < 1e-12
    assert not out["is_solution"]


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        args = ["--domain", "disc", "--h", "0.05", "--boundary", "affine", "0.3", "0", "0.1", "--seed", "5", "--svg"]
        assert run(d, "solve", *args) == 0
        assert main(["verify", "--field", str(d / "solution.csv"), "--seed", "5", "--out", str(d)]) == 0
    for name in ("solution.csv", "solve_report.json", "verify.json", "u.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "spacelike", "catalog"], capture_output=True, text=True)
    assert p.returncode == 0 and "sphere_cap" in p.stdout


def test_colormap_and_heatmap():
    c = svg.colormap([0.0, 0.5, 1.0])
    assert c.tolist() == [[49, 54, 149], [247, 247, 247], [165, 0, 38]]
    text = svg.heatmap(np.array([[0.0, np.nan], [1.0, 2.0]]), title="t<1>")
    assert text.count("<rect") == 3 + 32 and "t&lt;1&gt;" in text
    assert "max 2" in text and "min 0" in text
