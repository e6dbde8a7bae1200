"""Command-line interface: config parsing, exit codes, determinism."""

import json
import os

import pytest

from dicke.cli import ConfigInvalid, dispatch, load_config


def test_load_config_parses_keys(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("""
# a comment
kappa = 1.0
lambda_minus = 2.0   # inline comment
out = results
""")
    opts = load_config(cfg)
    assert opts == {"kappa": "1.0", "lambda_minus": "2.0", "out": "results"}


def test_load_config_rejects_bad_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("kappa 1.0\n")
    with pytest.raises(ConfigInvalid):
        load_config(cfg)


def test_invalid_parameters_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_OUT_ROOT", str(tmp_path))
    rc = dispatch(["curves", "--kappa", "-1.0", "--out", "x"])
    assert rc == 1


def test_curves_outputs_and_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_OUT_ROOT", str(tmp_path))
    assert dispatch(["curves", "--out", "a"]) == 0
    assert dispatch(["curves", "--out", "b"]) == 0
    for name in ("curve_pitchfork.csv", "curve_pole_flip.csv",
                 "curve_saddle_node.csv", "points.json"):
        pa = (tmp_path / "a" / name).read_bytes()
        pb = (tmp_path / "b" / name).read_bytes()
        assert pa == pb, f"{name} not byte-identical across runs"
    pts = json.loads((tmp_path / "a" / "points.json").read_text())
    assert set(pts) == {"PSN", "FP", "lambda_star", "omega0_star"}


def test_equilibria_command(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_OUT_ROOT", str(tmp_path))
    rc = dispatch(["equilibria", "--lambda-minus", "2.0",
                   "--lambda-plus", "0.9", "--out", "eq"])
    assert rc == 0
    lines = (tmp_path / "eq" / "equilibria.csv").read_text().splitlines()
    assert lines[0].startswith("label,chart,")
    assert len(lines) == 7  # header + six equilibria


def test_simulate_command_writes_trajectory(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_OUT_ROOT", str(tmp_path))
    rc = dispatch(["simulate", "--lambda-minus", "0.4", "--lambda-plus",
                   "0.4", "--t-final", "20", "--out", "sim"])
    assert rc == 0
    lines = (tmp_path / "sim" / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,a1,a2,x,y,photon,gamma,energy"
    assert len(lines) > 10


def test_unknown_repro_recipe_is_validation_error(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_OUT_ROOT", str(tmp_path))
    assert dispatch(["repro", "fig99"]) == 1
