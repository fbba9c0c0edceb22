"""
tests/test_cli.py – End-to-end runs through `hetlink.main`.

Covers:
  - report files, naming and byte-identical reruns
  - exit codes for bad configs and misplaced flags
  - the defaults subcommand and OUTPUT_DIR fallback
  - a full ti_qm tomography run and the bandwidth sweep CSV
"""

import csv
import io
import json

import pytest

from hetlink.main import main

SEED = 20240601


def _run(*args: str) -> int:
    return main(["run", *args])


# ── Reports ───────────────────────────────────────────────────────────────────
def test_budget_run_writes_summary(tmp_path, capsys):
    assert _run("--scenario", "budget", "--out", str(tmp_path)) == 0
    summary = tmp_path / f"budget_seed{SEED}_summary.json"
    assert str(summary) in capsys.readouterr().out
    report = json.loads(summary.read_text())
    assert report["budget_total"]["value"] == pytest.approx(0.106, abs=0.001)
    assert report["budget_total"]["exact"] is True
    assert report["fidelity"] is None
    assert "runtime_s" not in report


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _run("--scenario", "budget", "--format", "both", "--out", str(first)) == 0
    assert _run("--scenario", "budget", "--format", "both", "--out", str(second)) == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert f"budget_seed{SEED}_rates.csv" in names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_output_dir_falls_back_to_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "env_runs"))
    assert _run("--scenario", "budget", "--seed", "3") == 0
    assert (tmp_path / "env_runs" / "budget_seed3_summary.json").exists()


# ── Exit codes ────────────────────────────────────────────────────────────────
def test_invalid_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"noise": {"snr": -5}}))
    assert _run("--config", str(cfg), "--out", str(tmp_path)) == 2
    assert "noise.snr" in capsys.readouterr().err


def test_shots_rejected_for_budget(tmp_path):
    assert _run("--scenario", "budget", "--shots", "100", "--out", str(tmp_path)) == 2


def test_bad_schedule_exits_2(tmp_path):
    cfg = tmp_path / "late.json"
    cfg.write_text(json.dumps({"scenario": "afc_sweep", "memory": {"stark": {"first_pulse_start": 450.0}}}))
    assert _run("--config", str(cfg), "--out", str(tmp_path)) == 2


def test_defaults_subcommand(capsys):
    assert main(["defaults"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["scenario"] == "ti_qm"
    assert doc["master_seed"] == SEED


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "hetlink" in capsys.readouterr().out


# ── Scenarios ─────────────────────────────────────────────────────────────────
def test_ti_qm_tomography_run(tmp_path):
    cfg = tmp_path / "quick.json"
    cfg.write_text(json.dumps({"tomography": {"bootstrap_resamples": 100}}))
    assert _run("--config", str(cfg), "--scenario", "ti_qm", "--format", "both", "--out", str(tmp_path)) == 0
    report = json.loads((tmp_path / f"ti_qm_seed{SEED}_summary.json").read_text())
    fid, analytic = report["fidelity"], report["analytic_fidelity"]["value"]
    assert 0.003 < fid["stddev"] < 0.05
    assert abs(fid["value"] - analytic) <= 4 * fid["stddev"]
    assert (tmp_path / f"ti_qm_seed{SEED}_matrix.json").exists()
    counts = (tmp_path / f"ti_qm_seed{SEED}_counts.csv").read_text().splitlines()
    assert len(counts) == 10
    assert len(report["budget"]) == 10


def test_bandwidth_sweep_peaks_on_resonance(tmp_path):
    assert _run("--scenario", "bandwidth_sweep", "--format", "csv", "--out", str(tmp_path)) == 0
    text = (tmp_path / f"bandwidth_sweep_seed{SEED}_sweep.csv").read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    best = max(rows, key=lambda r: float(r["eta_bw"]))
    assert float(best["detuning_MHz"]) == 0.0
    assert float(best["eta_bw"]) == pytest.approx(0.7434, abs=1e-3)
