"""
tests/test_memory_node.py – AFC memory model.

Covers:
  - comb efficiency vs storage time, its log-quadratic shape and width fit
  - spectral density and bandwidth matching against the arctan oracle
  - Stark splitting, pulse phase and SMAFC readout scheduling
  - heralded storage channel and the residual storage dephasing from the input-state fidelities
"""

import math

import numpy as np
import pytest

from hetlink.exceptions import ScheduleError
from hetlink.models.state import DensityMatrix
from hetlink.schemas.memory import CombParams, MemoryParams, SpectralModel, StarkControl
from hetlink.services.memory_node import (
    afc_efficiency,
    afc_log_curvature,
    bandwidth_match,
    bandwidth_match_closed_form,
    bandwidth_match_components,
    echo_suppression,
    fit_comb_width,
    mean_stark_rate,
    smafc_readout_time,
    spectral_density,
    stark_pulse_phase,
    stark_rate,
    stark_splitting,
    storage_channel,
    storage_residual_channel,
)
from hetlink.services.qstate import apply_channel, bell_state as bell_ket, fidelity, herald
from tests.conftest import random_state

PUBLISHED_COMB = CombParams(d=10.5, finesse_F=7.7, gamma_comb=259.8)


# ── Comb efficiency ───────────────────────────────────────────────────────────
@pytest.mark.parametrize("t_ns, expected", [(500.0, 0.433), (1000.0, 0.310)])
def test_afc_efficiency_published_points(t_ns, expected):
    assert afc_efficiency(PUBLISHED_COMB, t_ns) == pytest.approx(expected, abs=0.01)


def test_zero_width_comb_is_time_independent():
    comb = CombParams(d=10.5, finesse_F=7.7, gamma_comb=0.0)
    assert afc_efficiency(comb, 0.0) == pytest.approx(afc_efficiency(comb, 5000.0))


def test_negative_storage_time_rejected():
    with pytest.raises(ValueError):
        afc_efficiency(PUBLISHED_COMB, -1.0)


def test_contradictory_finesse_rejected():
    with pytest.raises(ValueError):
        CombParams(d=10.5, finesse_F=5.0, gamma_comb=259.8, delta=2.0)


def test_efficiency_decreasing_and_log_quadratic():
    gen = np.random.default_rng(99)
    for _ in range(1000):
        comb = CombParams(d=gen.uniform(1, 20), finesse_F=gen.uniform(2, 20), gamma_comb=gen.uniform(10, 500))
        t_ns = gen.uniform(100, 3000)
        eta0, eta = afc_efficiency(comb, 0.0), afc_efficiency(comb, t_ns)
        assert eta <= eta0
        if eta > 1e-250:
            slope = (math.log(eta) - math.log(eta0)) / (t_ns * 1e-9) ** 2
            assert slope == pytest.approx(afc_log_curvature(comb), rel=1e-6)


def test_fit_comb_width_recovers_gamma():
    times = np.linspace(200, 3000, 15)
    eta = np.array([afc_efficiency(PUBLISHED_COMB, t) for t in times])
    guess = PUBLISHED_COMB.model_copy(update={"gamma_comb": 150.0})
    assert fit_comb_width(guess, times, eta) == pytest.approx(259.8, rel=1e-4)


def test_default_polarization_combs_use_derived_finesse(default_config):
    assert default_config.memory.comb_h.finesse == pytest.approx(7.70, abs=0.01)
    assert default_config.memory.comb_v.finesse == pytest.approx(7.72, abs=0.01)


# ── Spectral matching ─────────────────────────────────────────────────────────
def test_spectral_density_peak_and_tails():
    assert spectral_density(0.0, SpectralModel(zeeman_split=0.0)) == pytest.approx(2.0)
    assert spectral_density(1e6, SpectralModel()) == pytest.approx(0.0, abs=1e-9)
    f = np.linspace(-100, 100, 201)
    assert np.allclose(spectral_density(f, SpectralModel()), spectral_density(-f, SpectralModel()))


def test_bandwidth_match_published_value():
    m = SpectralModel()
    assert bandwidth_match(m) == pytest.approx(0.7434, abs=5e-4)
    assert bandwidth_match_closed_form(m) == pytest.approx(bandwidth_match(m), abs=1e-8)


def test_infinite_band_captures_everything():
    assert bandwidth_match(SpectralModel(qm_bandwidth=math.inf)) == pytest.approx(1.0)
    assert bandwidth_match_closed_form(SpectralModel(qm_bandwidth=math.inf)) == 1.0


def test_detuning_lowers_match():
    on = bandwidth_match(SpectralModel())
    values = [bandwidth_match(SpectralModel(detuning_df=df)) for df in np.linspace(0, 50, 11)]
    assert values[0] == pytest.approx(on)
    assert all(b < a for a, b in zip(values, values[1:]))


def test_bandwidth_match_symmetric_and_matches_oracle():
    gen = np.random.default_rng(7)
    for _ in range(1000):
        m = SpectralModel(
            gamma_natural=gen.uniform(5, 40),
            zeeman_split=gen.uniform(0, 30),
            qm_bandwidth=gen.uniform(5, 200),
            detuning_df=gen.uniform(-80, 80),
        )
        mirrored = m.model_copy(update={"detuning_df": -m.detuning_df})
        value = bandwidth_match(m)
        assert value == pytest.approx(bandwidth_match_closed_form(m), abs=1e-6)
        assert value == pytest.approx(bandwidth_match(mirrored), abs=1e-6)


def test_components_average_to_total():
    parts = bandwidth_match_components(SpectralModel())
    assert parts["sigma_plus"] == pytest.approx(parts["sigma_minus"])
    assert parts["total"] == pytest.approx(bandwidth_match(SpectralModel()))


# ── Stark control ─────────────────────────────────────────────────────────────
def test_stark_splitting_linear():
    assert stark_splitting(0.0, 5.80) == 0.0
    assert stark_splitting(100.0, 5.80) == pytest.approx(580.0)
    with pytest.raises(ValueError):
        stark_splitting(100.0, 0.0)


def test_mean_rate_from_asymmetric_pair():
    assert mean_stark_rate(5.74, -5.85) == pytest.approx(5.80, abs=0.01)


def test_pulse_rate_defaults_to_measured_pair():
    s = StarkControl()
    assert stark_rate(s) == pytest.approx(mean_stark_rate(5.74, -5.85))
    assert stark_rate(StarkControl(shift_rate=6.0)) == 6.0
    faster = StarkControl(shift_rate_pos=6.0, shift_rate_neg=-6.2)
    assert stark_pulse_phase(faster) == pytest.approx(stark_pulse_phase(s) * 6.1 / 5.795)


def test_first_pulse_imprints_pi_phase():
    s = StarkControl()
    assert stark_pulse_phase(s) == pytest.approx(math.pi, abs=0.05)
    assert echo_suppression(s) < 1e-3


@pytest.mark.parametrize("n, expected", [(1, 500.0), (2, 1000.0), (4, 2000.0)])
def test_readout_time(n, expected):
    assert smafc_readout_time(StarkControl(readout_order_n=n)) == expected


@pytest.mark.parametrize(
    "overrides",
    [
        {"first_pulse_start": 600.0},
        {"second_pulse_reversed": False},
        {"second_pulse_start": 400.0},
        {"readout_order_n": 2, "second_pulse_start": 1200.0},
        {"readout_order_n": 1, "first_pulse_start": 300.0, "second_pulse_start": 350.0},
    ],
)
def test_bad_schedules_rejected(overrides):
    with pytest.raises(ScheduleError):
        smafc_readout_time(StarkControl(**overrides))


def test_readout_order_bounded():
    with pytest.raises(ValueError):
        StarkControl(readout_order_n=11)


# ── Storage channel ───────────────────────────────────────────────────────────
def test_balanced_storage_keeps_state(bell_state):
    out, prob = herald(bell_state, storage_channel(0.31, 0.31))
    assert prob == pytest.approx(0.31)
    assert np.allclose(out.elements, bell_state.elements)


def test_imbalanced_storage_small_drop(bell_state):
    out, _ = herald(bell_state, storage_channel(0.310, 0.289))
    drop = 1 - fidelity(out, bell_ket())
    assert 0 < drop < 1e-3


def test_zero_h_efficiency_keeps_only_v(bell_state):
    out, _ = herald(bell_state, storage_channel(0.0, 0.5))
    diag = np.diag(out.elements).real
    assert diag[0] == pytest.approx(0.0) and diag[2] == pytest.approx(0.0)


def test_storage_efficiency_range():
    with pytest.raises(ValueError):
        storage_channel(1.2, 0.3)


def test_herald_probability_identity():
    gen = np.random.default_rng(31)
    for _ in range(1000):
        rho = random_state(gen)
        eta_h, eta_v = gen.uniform(size=2)
        out = apply_channel(rho, storage_channel(eta_h, eta_v))
        d = np.diag(rho.elements).real
        p_h, p_v = d[0] + d[2], d[1] + d[3]
        assert out.trace == pytest.approx(eta_h * p_h + eta_v * p_v, abs=1e-10)


def test_residual_storage_infidelity(bell_state):
    out = apply_channel(bell_state, storage_residual_channel(0.0024))
    assert 1 - fidelity(out, bell_ket()) == pytest.approx(0.0024)


def test_residual_infidelity_averages_input_states():
    assert MemoryParams().residual_infidelity == pytest.approx(1 - (0.9997 + 0.9990 + 0.9981 + 0.9934) / 4)
    assert MemoryParams().residual_infidelity == pytest.approx(0.0024, abs=1e-4)
    assert MemoryParams(input_fidelities={"H": 0.99}).residual_infidelity == pytest.approx(0.01)
    assert MemoryParams(storage_infidelity=0.005).residual_infidelity == 0.005
    with pytest.raises(ValueError):
        MemoryParams(input_fidelities={"H": 1.2})
