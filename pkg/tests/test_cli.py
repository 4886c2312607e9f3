import json
import subprocess
import sys

import numpy as np
import pytest

from ballfield import io as bio
from ballfield.cli import main
from ballfield.matern_sphere import MaternParams, matern_angular_spectrum
from ballfield.sampler import FieldRealization
from ballfield.spin_field import SpinSpectrumBall

SPHERE = ["--model", "matern_sphere", "--a", "10", "--sigma2", "1", "--nu", "0.5"]


def run(*argv):
    return main([str(a) for a in argv])


def test_spectrum_table_routes_agree(tmp_path):
    assert run("spectrum", *SPHERE, "--lmax", "4", "--r", "0.5:1:0.5", "--out", tmp_path) == 0
    header, rows = bio.read_csv(tmp_path / "spectrum.csv")
    assert header == ["nu", "ell", "r", "C_closed", "C_quadrature", "rel_diff"]
    assert len(rows) == 2 * 5
    assert max(r[5] for r in rows) < 1e-6
    assert (tmp_path / "spectrum_nu0.5.png").stat().st_size > 0
    manifest = bio.RunManifest.read(tmp_path / bio.MANIFEST_NAME)
    assert set(manifest.outputs) == {"spectrum.csv", "spectrum.json"}
    assert manifest.unhashed == ["spectrum_nu0.5.png"]


def test_rho_spectrum_lists_every_nu(tmp_path):
    argv = ["spectrum", "--model", "rho_matern", "--a", "10", "--sigma2", "1", "--nu", "0.5,2",
            "--lmax", "3", "--routes", "closed", "--no-plot", "--out", tmp_path]
    assert run(*argv) == 0
    header, rows = bio.read_csv(tmp_path / "spectrum.csv")
    assert header[-1] == "b_normalized"
    assert sorted({r[0] for r in rows}) == [0.5, 2.0]
    assert not list(tmp_path.glob("*.png"))


def test_custom_and_spin_spectrum_files(tmp_path):
    spec = matern_angular_spectrum(MaternParams(1, 10, 0.5), [1.0], 3, method="halfnu")
    (tmp_path / "s.json").write_text(spec.to_json())
    assert run("spectrum", "--model", "custom", "--spectrum-file", tmp_path / "s.json", "--out", tmp_path / "c") == 0
    _, rows = bio.read_csv(tmp_path / "c" / "spectrum.csv")
    assert [r[3] for r in rows] == list(spec.get(1.0))
    spin = SpinSpectrumBall(1, {(1, 1): 1.0, (2, 2): 0.5, (1, 3): 0.2})
    (tmp_path / "b.json").write_text(spin.to_json())
    assert run("spectrum", "--model", "spin_ball", "--spectrum-file", tmp_path / "b.json", "--r", "0.5",
               "--out", tmp_path / "b") == 0
    _, rows = bio.read_csv(tmp_path / "b" / "spectrum.csv")
    assert [r[0] for r in rows] == [1.0, 2.0]


def test_covariance_plane_with_negative_range(tmp_path):
    argv = ["covariance", "--model", "rho_matern", "--a", "10", "--sigma2", "1", "--nu", "1",
            "--grid", "-0.5:0.5:0.25", "--out", tmp_path]
    assert run(*argv) == 0
    header, rows = bio.read_csv(tmp_path / "covariance.csv")
    assert header == ["y1", "y2", "rho", "euclidean", "rho_matern", "difference"]
    assert len(rows) == 25
    origin = [r for r in rows if r[0] == 0 and r[1] == 0][0]
    assert origin[5] == 0.0
    assert {"covariance.png", "difference.png"} <= {p.name for p in tmp_path.iterdir()}


def test_simulate_is_reproducible_and_replayable(tmp_path, capsys):
    argv = ["simulate", *SPHERE, "--lmax", "6", "--n", "50", "--seed", "9", "--estimate-spectrum"]
    assert run(*argv, "--out", tmp_path / "a") == 0
    assert run(*argv, "--out", tmp_path / "b") == 0
    for name in ("realizations.csv", "realizations.bin", "spectrum_estimate.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    pts, vals = FieldRealization.read_bytes((tmp_path / "a" / "realizations.bin").read_bytes())
    assert vals.shape == (50, pts.shape[0])
    assert run("replay", tmp_path / "a" / bio.MANIFEST_NAME, "--out", tmp_path / "c", "--check") == 0
    # tampering is detected
    (tmp_path / "c" / "realizations.csv").write_text("x\n")
    manifest = bio.RunManifest.read(tmp_path / "a" / bio.MANIFEST_NAME)
    manifest.outputs["realizations.csv"] = "0" * 64
    (tmp_path / "a" / bio.MANIFEST_NAME).write_text(json.dumps(manifest.__dict__))
    assert run("replay", tmp_path / "a" / bio.MANIFEST_NAME, "--out", tmp_path / "d", "--check") == 1
    assert "differs" in capsys.readouterr().err


def test_simulate_rho_and_spin_models(tmp_path):
    assert run("simulate", "--model", "rho_matern", "--a", "10", "--sigma2", "1", "--nu", "1.5", "--lmax", "4",
               "--n", "3", "--points", "0,0,0;0.1,0.2,0.3", "--formats", "csv", "--no-plot",
               "--out", tmp_path / "r") == 0
    header, rows = bio.read_csv(tmp_path / "r" / "realizations.csv")
    assert len(rows) == 6 and not (tmp_path / "r" / "realizations.bin").exists()
    spin = SpinSpectrumBall(2, {(2, 2): 1.0, (3, 3): 0.5})
    (tmp_path / "b.json").write_text(spin.to_json())
    assert run("simulate", "--model", "spin_ball", "--spectrum-file", tmp_path / "b.json", "--lmax", "3",
               "--n", "2", "--out", tmp_path / "s") == 0
    _, vals = FieldRealization.read_bytes((tmp_path / "s" / "realizations.bin").read_bytes())
    assert np.iscomplexobj(vals) and vals.shape == (2, 125)


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = matern_sphere\na = 10\nsigma2 = 1\nnu = 0.5\nlmax = 2\nr = 1\nno-plot = true\n")
    assert run("spectrum", "--config", cfg, "--lmax", "3", "--routes", "closed", "--out", tmp_path) == 0
    _, rows = bio.read_csv(tmp_path / "spectrum.csv")
    assert len(rows) == 4
    manifest = bio.RunManifest.read(tmp_path / bio.MANIFEST_NAME)
    assert manifest.params["lmax"] == 3 and manifest.params["no_plot"] is True


@pytest.mark.parametrize("argv, needle", [
    (["spectrum", "--model", "matern_sphere", "--a", "10", "--sigma2", "1", "--r", "1"], "--nu"),
    (["covariance", *SPHERE, "--grid", "-1:1:0.5"], "outside the open ball"),
    (["simulate", "--model", "rho_matern", "--a", "10", "--sigma2", "1", "--nu", "1", "--points", "0,0,2"],
     "outside the open ball"),
    (["spectrum", *SPHERE, "--r", "-1"], "radii must be positive"),
    (["simulate", *SPHERE, "--formats", "png"], "--formats"),
    (["validate", "--suite", "nope"], "unknown suite"),
    (["spectrum", "--model", "matern_sphere", "--a", "-1", "--sigma2", "1", "--nu", "1", "--r", "1"], "a must be"),
])
def test_usage_errors_exit_2(tmp_path, capsys, argv, needle):
    assert run(*argv, *([] if argv[0] == "validate" else ["--out", tmp_path])) == 2
    err = capsys.readouterr().err
    assert err.startswith("ballfield: error:") and needle in err


def test_bad_thread_setting(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("BALLFIELD_THREADS", "zero")
    assert run("spectrum", *SPHERE, "--r", "1", "--out", tmp_path) == 2
    assert "BALLFIELD_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("BALLFIELD_THREADS", "1")
    assert run("spectrum", *SPHERE, "--r", "1", "--lmax", "1", "--no-plot", "--out", tmp_path) == 0


def test_validate_single_suite_report(tmp_path, capsys):
    assert run("validate", "--suite", "specfun", "--quiet", "--out", tmp_path) == 0
    report = json.loads(capsys.readouterr().out)
    assert report and all(r["status"] == "pass" for r in report)
    assert {"check", "status", "worst_error", "tolerance", "seconds", "detail"} <= set(report[0])
    assert (tmp_path / "report.json").is_file()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ballfield", "spectrum", *SPHERE, "--r", "1", "--lmax", "1",
                           "--no-plot", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "spectrum.csv").is_file()
