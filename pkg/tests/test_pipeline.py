"""
tests/test_pipeline.py – Error channels composed along each link stage.

Covers:
  - step order and fidelity breakdown per stage
  - analytic Bell fidelity at the three stages
  - heralded storage probability
  - isolated per-row infidelities against the published ledger
"""

import pytest

from hetlink.services.pipeline import (
    LINK_STAGES,
    analytic_fidelity,
    build_steps,
    first_order_fidelity,
    isolated_infidelities,
    propagate,
)
from tests.conftest import make_config

TI_QM_ORDER = [
    "pulse_excitation",
    "pi_photon_collection",
    "ion_decoherence",
    "arrival_time_jitter",
    "qfc",
    "qm_storage",
    "qm_storage_residual",
    "photon_state_detection",
    "ion_spam",
    "mw_rotation",
    "dark_noise",
]


# ── Structure ─────────────────────────────────────────────────────────────────
def test_ti_qm_step_order(default_config):
    assert [s.name for s in build_steps(default_config, "ti_qm")] == TI_QM_ORDER


def test_shorter_stages_drop_steps(default_config):
    names = [s.name for s in build_steps(default_config, "ion_photon")]
    assert "qfc" not in names and "qm_storage" not in names
    assert "qfc" in [s.name for s in build_steps(default_config, "post_qfc")]


def test_unknown_stage(default_config):
    with pytest.raises(ValueError):
        build_steps(default_config, "budget")


def test_breakdown_chains_fidelities(default_config):
    result = propagate(default_config, "ti_qm")
    assert [r.step for r in result.breakdown] == TI_QM_ORDER
    assert result.breakdown[-1].fidelity == pytest.approx(result.fidelity)
    start = result.breakdown[0].fidelity + result.breakdown[0].infidelity_added
    assert start == pytest.approx(1.0, abs=1e-9)
    drops = sum(r.infidelity_added for r in result.breakdown)
    assert start - drops == pytest.approx(result.fidelity, abs=1e-9)


# ── Fidelities ────────────────────────────────────────────────────────────────
def test_ion_photon_fidelity(default_config):
    assert analytic_fidelity(default_config, "ion_photon") == pytest.approx(0.955, abs=0.01)


def test_ti_qm_fidelity(default_config):
    f = analytic_fidelity(default_config, "ti_qm")
    assert 0.88 <= f <= 0.91
    assert f == pytest.approx(first_order_fidelity(default_config), abs=0.01)


def test_fidelity_drops_along_the_link(default_config):
    values = [analytic_fidelity(default_config, s) for s in LINK_STAGES]
    assert values == sorted(values, reverse=True)


def test_noiseless_detection_raises_fidelity():
    noisy = make_config()
    quiet = make_config(noise={**noisy.noise.model_dump(), "snr": 1e12})
    assert analytic_fidelity(quiet, "ti_qm") > analytic_fidelity(noisy, "ti_qm")


# ── Heralding ─────────────────────────────────────────────────────────────────
def test_herald_probability(default_config):
    assert propagate(default_config, "ti_qm").herald_probability == pytest.approx(0.2995, abs=2e-3)
    assert propagate(default_config, "post_qfc").herald_probability == 1.0


def test_physical_state_excludes_detection_noise(default_config):
    result = propagate(default_config, "ti_qm")
    assert result.physical_state.purity > result.state.purity


# ── Isolated rows ─────────────────────────────────────────────────────────────
def test_isolated_rows_match_ledger(default_config):
    rows = isolated_infidelities(default_config)
    assert rows["arrival_time_jitter"] == pytest.approx(1.2e-4, rel=0.1)
    assert rows["photon_state_detection"] == pytest.approx(2.9e-4, rel=0.1)
    assert rows["dark_noise"] == pytest.approx(0.75 / 29, rel=1e-6)
    assert rows["pulse_excitation"] == pytest.approx(0.033, rel=1e-6)
    assert set(rows) == {
        "pulse_excitation", "pi_photon_collection", "ion_decoherence", "arrival_time_jitter",
        "qfc", "qm_storage", "photon_state_detection", "ion_spam", "mw_rotation", "dark_noise",
    }
