"""
tests/test_config.py – Process settings and scenario config validation.

Covers:
  - environment-driven Settings and log-level parsing
  - ConfigError listing every invalid field
  - defaults document round trip and cross-section checks
"""

import importlib.util
import json
from pathlib import Path

import pytest

from hetlink.config import Settings, get_settings
from hetlink.exceptions import ConfigError
from hetlink.main import load_config
from hetlink.schemas.experiment import DEFAULT_SEED, ExperimentConfig
from hetlink.services.reports import to_json


# ── Settings ──────────────────────────────────────────────────────────────────
def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LOG_LEVEL", "debug")
    monkeypatch.setenv("LOG_JSON", "false")
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path))
    settings = get_settings()
    assert settings.LOG_LEVEL == "DEBUG"
    assert settings.log_level_number == 10
    assert settings.LOG_JSON is False
    assert settings.OUTPUT_DIR == tmp_path


def test_settings_reject_unknown_level():
    with pytest.raises(ValueError):
        Settings(LOG_LEVEL="chatty")


def test_settings_are_cached():
    assert get_settings() is get_settings()


# ── Scenario documents ────────────────────────────────────────────────────────
def test_defaults_round_trip(tmp_path):
    path = tmp_path / "defaults.json"
    text = to_json(ExperimentConfig().model_dump(mode="json"))
    path.write_text(text)
    cfg = load_config(path)
    assert to_json(cfg.model_dump(mode="json")) == text
    assert cfg.budget.branching_ratio == pytest.approx(2 / 3, rel=1e-14)
    assert cfg.master_seed == DEFAULT_SEED


def test_every_invalid_field_is_listed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"noise": {"snr": -1}, "chsh": {"visibility": 2}, "budget": {"qe_580": 0}}))
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert len(exc.value.errors) == 3
    text = str(exc.value)
    for field in ("noise.snr", "chsh.visibility", "budget.qe_580"):
        assert field in text


def test_unknown_field_rejected(tmp_path):
    path = tmp_path / "typo.json"
    path.write_text(json.dumps({"nosie": {}}))
    with pytest.raises(ConfigError, match="nosie"):
        load_config(path)


@pytest.mark.parametrize("payload", ["not json", "[1, 2]"])
def test_unreadable_documents(tmp_path, payload):
    path = tmp_path / "cfg.json"
    path.write_text(payload)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read"):
        load_config(tmp_path / "absent.json")


def test_overrides_merge_heralds():
    cfg = load_config(overrides={"scenario": "post_qfc", "heralds": {"post_qfc": 900}})
    assert cfg.heralds_for() == 900
    assert cfg.heralds["ti_qm"] == 1780


@pytest.mark.parametrize(
    "heralds",
    [{"ti_qm": 0}, {"warp_drive": 10}],
)
def test_heralds_validated(heralds):
    with pytest.raises(ConfigError):
        load_config(overrides={"heralds": heralds})


def test_heralded_scenario_needs_a_count():
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="chsh", heralds={"ti_qm": 10})


def test_echo_period_must_match_comb_spacing():
    with pytest.raises(ConfigError, match="echo_period"):
        load_config(overrides={"memory": {"stark": {"echo_period": 400.0}}})


def test_spectral_linewidth_must_match_ion_lifetime():
    cfg = load_config()
    assert cfg.ion.natural_linewidth_mhz == pytest.approx(cfg.memory.spectral.gamma_natural, rel=1e-3)
    with pytest.raises(ConfigError, match="gamma_natural"):
        load_config(overrides={"ion": {"excited_lifetime_tau": 6.0}})
    both = load_config(overrides={"ion": {"excited_lifetime_tau": 6.0}, "memory": {"spectral": {"gamma_natural": 26.5}}})
    assert both.memory.spectral.gamma_natural == 26.5


def test_export_defaults_script(tmp_path):
    script = Path(__file__).resolve().parents[1] / "scripts" / "export_defaults.py"
    module_spec = importlib.util.spec_from_file_location("export_defaults", script)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    out = tmp_path / "defaults.json"
    module.export(out)
    assert json.loads(out.read_text())["heralds"]["ti_qm"] == 1780
