import json
import subprocess
import sys

import numpy as np

from mellin_levy.cli import main
from mellin_levy.experiment import read_table
from mellin_levy.simulate import load_path


def test_simulate_then_estimate(tmp_path):
    path = tmp_path / "path.csv"
    assert main(["simulate", "--n", "2000", "--seed", "3", "--out", str(path)]) == 0
    p = load_path(path)
    assert p.n == 2000 and p.delta == 1.0

    out = tmp_path / "est.csv"
    assert main(["estimate", "--in", str(path), "--x-grid", "1:3:65", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    meta = json.loads(lines[0][2:])
    assert meta["variant"] == "first-stab" and meta["target"] == "nu"
    assert lines[1] == "x,nu_hat"
    data = np.loadtxt(out, delimiter=",", skiprows=2)
    assert data.shape == (65, 2)
    assert np.max(np.abs(data[:, 1] - np.exp(-data[:, 0]))) < 0.3


def test_estimate_with_sigma2_estimate(tmp_path):
    path = tmp_path / "path.csv"
    main(["simulate", "--n", "1000", "--sigma2", "0.25", "--out", str(path)])
    out = tmp_path / "est.csv"
    rc = main(["estimate", "--in", str(path), "--variant", "second", "--sigma2", "estimate",
               "--sigma-u", "0.05", "--u-max", "0.3", "--v-max", "1.0", "--out", str(out)])
    assert rc == 0
    assert json.loads(out.read_text().splitlines()[0][2:])["target"] == "nu_bar"


def test_study_and_tune(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_list": [500], "runs": 2, "u_grid": [0.4], "v_grid": [1.0, 1.1],
                               "x_points": 65}))
    table = tmp_path / "table.csv"
    assert main(["mc-study", "--config", str(cfg), "--out", str(table)]) == 0
    rows = read_table(table)
    assert [(r["U"], r["V"]) for r in rows] == [(0.4, 1.0), (0.4, 1.1)]

    best = tmp_path / "best.csv"
    assert main(["tune", "--config", str(cfg), "--out", str(best), "--paper-faithful"]) == 0
    lines = best.read_text().splitlines()
    assert lines[0] == "n,U,V,mean_risk"
    assert lines[1].startswith("500,0.4,")


def test_errors_exit_nonzero(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_list": [300], "runs": 1, "fixed_pairs": {"300": [60.0, 1.0]}}))
    assert main(["mc-study", "--config", str(cfg), "--out", str(tmp_path / "t.csv")]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["estimate", "--in", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 1


def test_console_entry_point(tmp_path):
    out = tmp_path / "p.csv"
    r = subprocess.run([sys.executable, "-m", "mellin_levy.cli", "simulate", "--n", "10", "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert len(out.read_text().splitlines()) == 11
