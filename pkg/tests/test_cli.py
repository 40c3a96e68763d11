import csv
import json
import os

import numpy as np
import pytest

from rl1lae.cli import RunManifest, emit_results, format_float, main, results_csv
from rl1lae.config import parse_config
from rl1lae.experiment import MseTrajectory
from rl1lae.filters import Algorithm

QUICK = ["--runs", "2", "--iterations", "40"]


def test_csv_hand_example():
    traj = {Algorithm.LAE: MseTrajectory(Algorithm.LAE, np.array([1.0, 0.1]), 1)}
    assert results_csv(traj) == "iteration,algorithm,mse_linear,mse_db\n0,LAE,1,0\n1,LAE,0.1,-10\n"


def test_csv_sorted_by_algorithm_then_iteration():
    trajs = {
        a: MseTrajectory(a, np.array([0.5, 0.25, 0.125]), 1)
        for a in (Algorithm.RL1_LMS, Algorithm.LMS, Algorithm.RL1_LAE, Algorithm.LAE)
    }
    rows = list(csv.reader(results_csv(trajs).splitlines()))[1:]
    keys = [(r[1], int(r[0])) for r in rows]
    assert keys == sorted(keys)
    assert "\r" not in results_csv(trajs)


@pytest.mark.parametrize("value", [0.1, 1 / 3, 1e-300, 123456.789, -7.25, 2.0**-40])
def test_float_format_round_trips(value):
    assert float(format_float(value)) == value


def test_emit_results_writes_files(tmp_path):
    traj = {Algorithm.LMS: MseTrajectory(Algorithm.LMS, np.array([1.0, 0.5]), 3)}
    manifest = RunManifest(parse_config("runs = 3"))
    paths = emit_results(traj, manifest, tmp_path / "out", plot_data=True)
    names = sorted(p.name for p in paths)
    assert names == ["manifest.json", "mse.csv", "plot_data.csv"]
    data = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert data["config"]["runs"] == 3
    assert data["master_seed"] == 0
    assert "mse.csv" in data["outputs"]
    plot = (tmp_path / "out" / "plot_data.csv").read_text().splitlines()
    assert plot[0] == "iteration,LMS"
    assert plot[2] == "1," + format_float(10 * np.log10(0.5))


def test_unwritable_destination_writes_nothing(tmp_path):
    target = tmp_path / "locked"
    target.mkdir()
    os.chmod(target, 0o500)
    try:
        if os.access(target, os.W_OK):
            pytest.skip("running with privileges that ignore directory permissions")
        traj = {Algorithm.LMS: MseTrajectory(Algorithm.LMS, np.array([1.0]), 1)}
        with pytest.raises(OSError):
            emit_results(traj, RunManifest(parse_config("")), target)
        assert list(target.iterdir()) == []
    finally:
        os.chmod(target, 0o700)


def test_destination_is_a_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    traj = {Algorithm.LMS: MseTrajectory(Algorithm.LMS, np.array([1.0]), 1)}
    with pytest.raises(OSError):
        emit_results(traj, RunManifest(parse_config("")), blocker / "sub")
    assert blocker.read_text() == "x"


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        assert name in out


def test_preset_run_is_reproducible(tmp_path):
    assert main(["preset", "fig2", *QUICK, "--out", str(tmp_path / "a")]) == 0
    assert main(["preset", "fig2", *QUICK, "--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    a = (tmp_path / "a" / "mse.csv").read_bytes()
    assert a == (tmp_path / "b" / "mse.csv").read_bytes()
    assert a.startswith(b"iteration,algorithm,mse_linear,mse_db\n")
    assert a.count(b"\n") == 1 + 4 * 40


def test_manifest_replay(tmp_path):
    assert main(["preset", "fig4", *QUICK, "--seed", "9", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "mse.csv").read_bytes() == (tmp_path / "b" / "mse.csv").read_bytes()
    manifest = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert manifest["config"]["sparsity"] == 4
    assert manifest["config"]["seed"] == 9


def test_run_config_file_with_flags(tmp_path):
    cfg = tmp_path / "s.toml"
    cfg.write_text('algorithms = ["LAE", "RL1_LAE"]\nchannel_length = 12\nsparsity = 2\n')
    assert main(["run", str(cfg), *QUICK, "--set", "phi=0.4", "--out", str(tmp_path / "o")]) == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["config"]["phi"] == 0.4
    assert manifest["config"]["runs"] == 2
    rows = (tmp_path / "o" / "mse.csv").read_text().splitlines()
    assert {r.split(",")[1] for r in rows[1:]} == {"LAE", "RL1_LAE"}


def test_fig6_sweep_outputs(tmp_path):
    assert main(["preset", "fig6", *QUICK, "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["manifest.json", "mse_phi_0.1.csv", "mse_phi_0.2.csv", "mse_phi_0.4.csv", "mse_phi_0.csv", "summary.csv"]
    summary = list(csv.DictReader((tmp_path / "summary.csv").read_text().splitlines()))
    assert len(summary) == 16
    assert summary[0].keys() == {"phi", "algorithm", "steady_state_db"}


def test_sweep_command(tmp_path):
    code = main(["sweep", "--preset", "fig3", "--param", "sigma2_sq", "--values", "20", "80", *QUICK, "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "mse_sigma2_sq_20.csv").exists()
    assert (tmp_path / "mse_sigma2_sq_80.csv").exists()


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("RL1LAE_OUTPUT_DIR", str(tmp_path))
    assert main(["preset", "fig1", *QUICK]) == 0
    assert (tmp_path / "fig1" / "mse.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("phi = 1.5\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "phi" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.toml")]) == 1


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["preset", "fig1", *QUICK, "--out", str(blocker / "sub")]) == 3


def test_all_diverged_exit_code(tmp_path):
    code = main(["preset", "fig1", "--runs", "2", "--iterations", "500", "--set", "mu=5", "--set", "algorithms=LMS", "--out", str(tmp_path)])
    assert code == 2
