"""Command line driver: config validation, artifacts, reproducibility."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from glvortex import cli
from glvortex.continuation import Branch, BranchPoint
from glvortex.grid import make_grid


def _run(args):
    return cli.main([str(a) for a in args])


def _write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


def _solve_cfg(**kw):
    cfg = {
        "mode": "solve",
        "d": 3.0,
        "N": 16,
        "mu": {"lo": 0.0, "hi": 2.0, "start": 0.0},
        "guess": {"type": "constant", "value": 0.8},
    }
    cfg.update(kw)
    return cfg


def test_missing_config_is_usage_error(tmp_path, capsys):
    assert _run(["solve", "--config", tmp_path / "absent.json"]) == 2
    assert "config" in capsys.readouterr().err.lower()


def test_bad_json_is_usage_error(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert _run(["solve", "--config", p]) == 2
    capsys.readouterr()


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = _solve_cfg(banana=1)
    assert _run(["solve", "--config", _write_cfg(tmp_path, cfg),
                 "--out", tmp_path / "o"]) == 2
    err = capsys.readouterr().err
    assert "banana" in err


def test_mode_mismatch_rejected(tmp_path, capsys):
    cfg = _solve_cfg(mode="trace")
    assert _run(["solve", "--config", _write_cfg(tmp_path, cfg),
                 "--out", tmp_path / "o"]) == 2
    capsys.readouterr()


def test_odd_grid_rejected(tmp_path, capsys):
    cfg = _solve_cfg(N=17)
    assert _run(["solve", "--config", _write_cfg(tmp_path, cfg),
                 "--out", tmp_path / "o"]) == 2
    capsys.readouterr()


def test_solve_flat_state(tmp_path, capsys):
    out = tmp_path / "run"
    cfg = _write_cfg(tmp_path, _solve_cfg())
    assert _run(["solve", "--config", cfg, "--out", out]) == 0
    capsys.readouterr()
    summary = json.loads((out / "solution.json").read_text())
    assert summary["converged"]
    # mu = 0 ground state: energy density exactly -1
    assert summary["energy"] == pytest.approx(-1.0, abs=1e-12)
    assert abs(summary["eta"]) < 1e-10
    assert summary["isotropy_label"] == "D4"
    assert (out / "pattern_solution.abs2.pgm").exists()
    assert (out / "pattern_solution.arg.pgm").exists()
    assert (out / "pattern_solution.psi.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert "glvortex" in manifest["versions"]


def test_verify_mode_passes(capsys, tmp_path):
    cfg = _write_cfg(tmp_path, {"mode": "verify", "seed": 3}, "v.json")
    assert _run(["verify", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "5/5" in out


def test_eigen_mode_spectrum(tmp_path, capsys):
    out = tmp_path / "eig"
    cfg = _solve_cfg(mode="eigen")
    cfg["mu"]["start"] = 0.5
    cfg["guess"] = {"type": "perturbed", "amplitude": 0.05}
    assert _run(["eigen", "--config", _write_cfg(tmp_path, cfg),
                 "--out", out, "--seed", 5]) == 0
    capsys.readouterr()
    rows = (out / "spectrum.csv").read_text().strip().splitlines()
    assert rows[0] == "k,eigenvalue,phase_mode"
    vals = [r.split(",") for r in rows[1:]]
    lams = [float(v[1]) for v in vals]
    assert lams == sorted(lams)
    # exactly one phase mode, with a near-zero eigenvalue
    phase_rows = [v for v in vals if v[2] == "1"]
    assert len(phase_rows) == 1
    assert abs(float(phase_rows[0][1])) < 1e-6


def test_pgm_and_psi_roundtrip(tmp_path):
    g = make_grid(3.0, 10)
    rng = np.random.default_rng(3)
    psi = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    cli.write_pattern(tmp_path, "t", psi, [])
    back = cli.read_psi_csv(tmp_path / "pattern_t.psi.csv")
    # 17 significant digits reproduce doubles exactly
    assert np.array_equal(back, psi)
    pgm = (tmp_path / "pattern_t.abs2.pgm").read_text().split()
    assert pgm[0] == "P2"
    w, h, maxval = int(pgm[1]), int(pgm[2]), int(pgm[3])
    assert (w, h, maxval) == (g.N + 1, g.N + 1, 255)
    levels = np.array(pgm[4:], dtype=int)
    assert levels.size == w * h
    assert levels.min() >= 0 and levels.max() <= 255


def test_branch_csv_roundtrip():
    g = make_grid(3.0, 8)
    br = Branch(label="T")
    rng = np.random.default_rng(1)
    for k in range(4):
        psi = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        br.points.append(BranchPoint(
            psi=psi, eta=rng.standard_normal() * 1e-12, mu=0.3 * k,
            arclength=0.11 * k, energy=-rng.random(), norm_psi=rng.random(),
            n_unstable=k % 3, isotropy_label="<s>", vorticity=k - 1,
            stability=None))
    text = cli.branch_csv_text(br)
    lines = text.strip().splitlines()
    assert lines[0] == ("arclength,mu,energy,eta,norm_psi,n_unstable,"
                        "isotropy_label,total_vorticity")
    assert len(lines) == 5
    for k, row in enumerate(lines[1:]):
        f = row.split(",")
        p = br.points[k]
        assert float(f[0]) == p.arclength
        assert float(f[1]) == p.mu
        assert float(f[2]) == p.energy
        assert float(f[3]) == p.eta
        assert float(f[4]) == p.norm_psi
        assert int(f[5]) == p.n_unstable
        assert f[6] == "<s>"
        assert int(f[7]) == p.vorticity


def test_branch_csv_empty_branch():
    br = Branch(label="E")
    text = cli.branch_csv_text(br)
    assert text.strip() == ("arclength,mu,energy,eta,norm_psi,n_unstable,"
                            "isotropy_label,total_vorticity")


def test_diagram_small_deterministic(tmp_path, capsys):
    cfg = {
        "mode": "diagram",
        "d": 3.0,
        "N": 16,
        "mu": {"lo": 0.0, "hi": 1.2, "start": 0.0},
        "step": {"ds0": 0.06, "ds_max": 0.15, "max_points": 40},
        "branches": [
            {"label": "A", "guess": {"type": "constant", "value": 1.0},
             "mu_start": 0.0, "direction": 1},
        ],
    }
    p = _write_cfg(tmp_path, cfg)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert _run(["diagram", "--config", p, "--out", out1]) == 0
    assert _run(["diagram", "--config", p, "--out", out2]) == 0
    capsys.readouterr()
    a1 = (out1 / "branch_A.csv").read_bytes()
    a2 = (out2 / "branch_A.csv").read_bytes()
    assert a1 == a2
    rows = a1.decode().strip().splitlines()[1:]
    assert len(rows) >= 10
    mus = [float(r.split(",")[1]) for r in rows]
    assert mus[0] == 0.0
    assert max(mus) <= 1.2 + 1e-9
    assert (out1 / "bifurcations.csv").exists()
    man = json.loads((out1 / "manifest.json").read_text())
    assert man["status"] == "ok"
    assert any(a.startswith("branch_A") for a in man["artifacts"])


def test_trace_switch_without_source_fails(tmp_path, capsys):
    cfg = {
        "mode": "trace",
        "d": 3.0,
        "N": 16,
        "mu": {"lo": 0.0, "hi": 1.0},
        "branch": {"label": "C",
                   "guess": {"type": "switch",
                             "from_run": str(tmp_path / "nowhere"),
                             "bifurcation": "A.0",
                             "family": "<s>", "sign": 1}},
    }
    rc = _run(["trace", "--config", _write_cfg(tmp_path, cfg),
               "--out", tmp_path / "o"])
    assert rc == 1
    capsys.readouterr()
    assert (tmp_path / "o" / "FAILED").exists()
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert man["status"] == "failed"


def test_entry_point_runs():
    # the installed console script must answer --help without a config
    proc = subprocess.run([sys.executable, "-m", "glvortex", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "solve" in proc.stdout
