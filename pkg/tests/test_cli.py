"""End-to-end tests of the berry-ring command line interface."""

import hashlib
import json
import os

import numpy as np
import pytest

from berryring import OutputError, cli


def _read_csv(path):
    """Return (meta dict, column names, data array) of one output CSV."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    i = 0
    while lines[i].startswith("#"):
        key, _, value = lines[i][1:].partition(":")
        meta[key.strip()] = value.strip()
        i += 1
    columns = lines[i].split(",")
    data = np.array(
        [[float(v) for v in line.split(",")] for line in lines[i + 1 :]]
    )
    return meta, columns, data


def _data_lines(path):
    """CSV lines with the '#' metadata stripped (header + rows)."""
    with open(path, encoding="utf-8") as fh:
        return [ln for ln in fh.read().splitlines() if not ln.startswith("#")]


TRAJ_ARGS = ["--set", "trajectory.n_samples=41", "--set", "trajectory.lam=1.022"]


def test_trajectory_schema_and_norm(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["trajectory", *TRAJ_ARGS, "--out", str(out)]) == 0
    meta, columns, data = _read_csv(out / "fig5.csv")
    assert columns == ["s", "p1", "p2", "p3"]
    assert data.shape == (41, 4)
    assert meta["berry-ring scenario"] == "trajectory"
    assert "config_sha256" in meta and "backend" in meta
    norms = np.linalg.norm(data[:, 1:], axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-8)
    assert (out / "manifest.json").is_file()
    assert (out / "plot_fig5.py").is_file()


def test_rerun_is_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["trajectory", *TRAJ_ARGS, "--out", str(out1)]) == 0
    assert cli.main(["trajectory", *TRAJ_ARGS, "--out", str(out2)]) == 0
    for name in ("fig5.csv", "manifest.json", "plot_fig5.py"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


SWEEP_ARGS = [
    "--set", "sweep_alpha.start=0.016",
    "--set", "sweep_alpha.stop=0.024",
    "--set", "sweep_alpha.step=4e-4",
]


def test_sweep_alpha_schema_and_dip(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["sweep-alpha", *SWEEP_ARGS, "--out", str(out)]) == 0
    _, columns, data = _read_csv(out / "fig3.csv")
    assert columns == ["alpha", "m12_sq", "arg_m11", "arg_m22", "p11", "p21"]
    assert data.shape == (21, 6)
    p11 = data[:, 4]
    assert p11.min() < 0.05
    # dip sits at the calibrated resonance alpha
    assert data[np.argmin(p11), 0] == pytest.approx(0.02, abs=5e-4)


def test_parallel_matches_serial_rows(tmp_path):
    out1, out2 = tmp_path / "serial", tmp_path / "par"
    code = cli.main(
        ["sweep-alpha", *SWEEP_ARGS, "--set", "workers=1", "--out", str(out1)]
    )
    assert code == 0
    code = cli.main(
        ["sweep-alpha", *SWEEP_ARGS, "--set", "workers=4", "--out", str(out2)]
    )
    assert code == 0
    assert _data_lines(out1 / "fig3.csv") == _data_lines(out2 / "fig3.csv")


def test_sweep_lambda_sudden_limit_row(tmp_path):
    out = tmp_path / "out"
    code = cli.main(
        [
            "sweep-lambda",
            "--set", "sweep_lambda.stop=0.1",
            "--set", "sweep_lambda.step=0.05",
            "--out", str(out),
        ]
    )
    assert code == 0
    _, columns, data = _read_csv(out / "fig6.csv")
    assert columns == ["lambda", "p_z"]
    assert data.shape == (3, 2)
    assert data[0, 0] == 0.0 and data[0, 1] == 1.0


def test_spectrum_schema(tmp_path):
    out = tmp_path / "out"
    code = cli.main(
        ["spectrum", "--set", "spectrum.step=2.5e-3", "--out", str(out)]
    )
    assert code == 0
    _, columns, data = _read_csv(out / "spectrum.csv")
    assert columns == ["vartheta", "p_near", "p_exact"]
    assert np.abs(data[:, 1] - data[:, 2]).max() < 1e-3
    # defaults are strongly undercoupled (xi_l << xi_c): a shallow dip at 0
    i0 = np.argmin(np.abs(data[:, 0]))
    assert i0 == np.argmin(data[:, 2])
    assert data[i0, 2] < data[0, 2] and data[i0, 2] < data[-1, 2]


def test_broadening_floor(tmp_path):
    out = tmp_path / "out"
    code = cli.main(
        ["broadening", "--set", "broadening.step=2e-3", "--out", str(out)]
    )
    assert code == 0
    meta, columns, data = _read_csv(out / "broadening.csv")
    assert columns == ["vartheta", "t_broadened", "t_critical"]
    i0 = np.argmin(np.abs(data[:, 0]))
    q_dvt = 500.0 * 0.01
    assert data[i0, 1] == pytest.approx(q_dvt / (1 + q_dvt), abs=1e-12)
    assert data[i0, 2] == 0.0
    assert float(meta["dip_floor"]) == pytest.approx(q_dvt / (1 + q_dvt), abs=1e-12)


def test_frenet_demo_schema(tmp_path):
    out = tmp_path / "out"
    code = cli.main(
        ["frenet-demo", "--set", "frenet.n_samples=501", "--out", str(out)]
    )
    assert code == 0
    _, columns, data = _read_csv(out / "frenet.csv")
    assert columns == ["s", "curvature", "torsion", "kappa2"]
    interior = data[5:-5]
    np.testing.assert_allclose(interior[:, 1], 0.8, rtol=1e-4)
    np.testing.assert_allclose(interior[:, 2], 0.4, rtol=1e-4)
    np.testing.assert_allclose(interior[:, 3], interior[:, 2], atol=1e-12)


def test_manifest_contents(tmp_path):
    out = tmp_path / "out"
    paths = cli.run("trajectory", overrides=TRAJ_ARGS[1::2], out_dir=str(out))
    assert [os.path.basename(p) for p in paths] == [
        "fig5.csv", "plot_fig5.py", "manifest.json",
    ]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "trajectory"
    assert manifest["rows"] == 41
    assert manifest["versions"]["numpy"] == np.__version__
    assert manifest["integration"]["steps_per_unit"] == 2000.0
    meta, _, _ = _read_csv(out / "fig5.csv")
    assert manifest["config_sha256"] == meta["config_sha256"]
    for name, digest in manifest["files"].items():
        actual = hashlib.sha256((out / name).read_bytes()).hexdigest()
        assert actual == digest


def test_yaml_config_file(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("trajectory:\n  n_samples: 11\n  lam: 2.0\n")
    out = tmp_path / "out"
    code = cli.main(["trajectory", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    _, _, data = _read_csv(out / "fig5.csv")
    assert data.shape[0] == 11


def test_set_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("trajectory:\n  n_samples: 11\n")
    out = tmp_path / "out"
    code = cli.main(
        [
            "trajectory",
            "--config", str(cfg),
            "--set", "trajectory.n_samples=7",
            "--set", "trajectory.lam=1.5",
            "--out", str(out),
        ]
    )
    assert code == 0
    _, _, data = _read_csv(out / "fig5.csv")
    assert data.shape[0] == 7


def test_set_accepts_scientific_notation(tmp_path):
    # YAML 1.1 reads 4e-4 as a string; the CLI coerces numeric-looking strings.
    out = tmp_path / "out"
    code = cli.main(
        [
            "sweep-alpha",
            "--set", "sweep_alpha.start=0.018",
            "--set", "sweep_alpha.stop=0.022",
            "--set", "sweep_alpha.step=4e-4",
            "--out", str(out),
        ]
    )
    assert code == 0
    _, _, data = _read_csv(out / "fig3.csv")
    assert data.shape[0] == 11


def test_env_var_out_dir(tmp_path, monkeypatch):
    target = tmp_path / "envout"
    monkeypatch.setenv(cli.ENV_OUT_DIR, str(target))
    monkeypatch.chdir(tmp_path)
    assert cli.main(["trajectory", *TRAJ_ARGS]) == 0
    assert (target / "fig5.csv").is_file()


def test_exit_2_unknown_key(tmp_path):
    code = cli.main(
        ["trajectory", "--set", "nonsense.key=1", "--out", str(tmp_path / "o")]
    )
    assert code == 2


def test_exit_2_bad_value(tmp_path):
    code = cli.main(
        ["sweep-alpha", "--set", "sweep_alpha.step=-1", "--out", str(tmp_path / "o")]
    )
    assert code == 2


def test_exit_2_malformed_set(tmp_path):
    code = cli.main(
        ["trajectory", "--set", "trajectory.lam", "--out", str(tmp_path / "o")]
    )
    assert code == 2


def test_exit_2_bad_initial(tmp_path):
    code = cli.main(
        [
            "trajectory",
            "--set", "trajectory.initial=sideways",
            "--out", str(tmp_path / "o"),
        ]
    )
    assert code == 2


def test_exit_2_unknown_scenario():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["warp-drive"])
    assert excinfo.value.code == 2


def test_exit_3_singular_spectrum(tmp_path):
    code = cli.main(
        [
            "spectrum",
            "--set", "coupler.xi_c=0.0",
            "--set", "coupler.xi_l=0.0",
            "--set", "coupler.theta_t=0.0",
            "--set", "spectrum.step=0.025",
            "--out", str(tmp_path / "o"),
        ]
    )
    assert code == 3


def test_exit_4_missing_config(tmp_path):
    code = cli.main(
        [
            "trajectory",
            "--config", str(tmp_path / "absent.yaml"),
            "--out", str(tmp_path / "o"),
        ]
    )
    assert code == 4


def test_exit_4_out_dir_is_a_file(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory\n")
    code = cli.main(["trajectory", *TRAJ_ARGS, "--out", str(blocker)])
    assert code == 4


def test_emit_plots_requires_results(tmp_path):
    with pytest.raises(OutputError):
        cli.emit_plots(str(tmp_path))


def test_run_rejects_unknown_scenario(tmp_path):
    from berryring import ConfigError

    with pytest.raises(ConfigError):
        cli.run("not-a-scenario", out_dir=str(tmp_path / "o"))
