"""
tests/test_budget.py – Entanglement rates, efficiencies, SNR and the infidelity ledger.

Covers:
  - published rates and end-to-end efficiencies from the default tables
  - rate arithmetic and polarization handling
  - sum and product composition of error sources
  - SNR edge cases and ledger assembly
"""

import math

import pytest

from hetlink.schemas.budget import BudgetTables, EfficiencyStage, ErrorSource, RateChain
from hetlink.schemas.ion import ExcitationFit, IonParams
from hetlink.services.budget import (
    build_error_ledger,
    end_to_end_efficiency,
    ledger_total,
    pi_probability,
    published_sources,
    r369_chain,
    rate,
    rate_rows,
    snr_and_noise_rate,
    total_infidelity,
)


@pytest.fixture
def rates() -> dict[str, float]:
    return {r.name: r.value for r in rate_rows(BudgetTables(), IonParams(), ExcitationFit())}


# ── Published figures ─────────────────────────────────────────────────────────
def test_ion_photon_rate(rates):
    assert rates["R_369"] == pytest.approx(1352, rel=0.02)


def test_conversion_efficiency_and_rate(rates):
    assert rates["eta_QFC"] == pytest.approx(7.6e-4, rel=0.05)
    assert rates["R_580"] == pytest.approx(1.8, rel=0.05)


def test_memory_link_rate(rates):
    assert rates["eta_QM"] == pytest.approx(0.144, abs=0.001)
    assert rates["eta_total"] == pytest.approx(1.1e-4, rel=0.1)
    assert rates["R_TI-QM"] == pytest.approx(0.2, rel=0.1)


def test_snr_row(rates):
    assert rates["SNR"] == pytest.approx(28.57, abs=0.01)
    assert rates["noise_fraction"] == pytest.approx(1 / 29.57, rel=1e-9)


def test_unpolarized_uses_mean_of_pair():
    tables = BudgetTables(polarization=None)
    rates = {r.name: r.value for r in rate_rows(tables, IonParams(), ExcitationFit())}
    assert rates["eta_QM"] == pytest.approx(0.74 * 0.189)


def test_pi_probability_follows_excitation_fit():
    assert pi_probability(IonParams(), ExcitationFit()) == pytest.approx(0.96)
    weak = ExcitationFit(E=0.5)
    assert pi_probability(IonParams(), weak) == pytest.approx(0.96 * math.sin(math.pi * math.sqrt(0.5) / 2) ** 2)
    assert pi_probability(IonParams(pi_excitation_prob=0.9), weak) == 0.9


def test_weaker_pulse_lowers_every_rate():
    full = {r.name: r.value for r in rate_rows(BudgetTables(), IonParams(), ExcitationFit())}
    weak = {r.name: r.value for r in rate_rows(BudgetTables(), IonParams(), ExcitationFit(E=0.5))}
    ratio = pi_probability(IonParams(), ExcitationFit(E=0.5)) / 0.96
    for name in ("R_369", "R_580", "R_TI-QM"):
        assert weak[name] == pytest.approx(full[name] * ratio)
    assert weak["eta_QFC"] == full["eta_QFC"]


def test_ion_branching_enters_the_chain():
    chain = r369_chain(BudgetTables(), IonParams(), ExcitationFit())
    assert chain.stages[0].name == "P_S1/2"
    assert chain.stages[0].value == 0.995
    base = rate(chain, "H")
    lower = rate(r369_chain(BudgetTables(), IonParams(branching_S12=0.5), ExcitationFit()), "H")
    assert lower == pytest.approx(base * 0.5 / 0.995)


# ── Arithmetic ────────────────────────────────────────────────────────────────
def test_efficiency_is_order_independent():
    stages = [EfficiencyStage(name=n, value=v) for n, v in [("a", 0.5), ("b", 0.2), ("c", 0.9)]]
    assert end_to_end_efficiency(stages) == pytest.approx(0.09)
    assert end_to_end_efficiency(stages[::-1]) == end_to_end_efficiency(stages)


def test_rate_from_chain():
    chain = RateChain(stages=(EfficiencyStage(name="t", value=0.5),), repetition_rate=1000.0)
    assert rate(chain) == pytest.approx(500.0)


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        end_to_end_efficiency([])
    with pytest.raises(ValueError):
        rate(RateChain(repetition_rate=1.0))
    with pytest.raises(ValueError):
        total_infidelity([])


def test_unknown_polarization():
    stage = EfficiencyStage(name="s", value=0.5, polarization_dependent=(0.4, 0.6))
    with pytest.raises(ValueError):
        stage.value_for("D")


# ── Composition ───────────────────────────────────────────────────────────────
def test_sum_and_product_totals():
    sources = [ErrorSource(name="a", infidelity=0.1), ErrorSource(name="b", infidelity=0.1)]
    assert total_infidelity(sources) == pytest.approx(0.2)
    assert total_infidelity(sources, "product") == pytest.approx(0.19)
    with pytest.raises(ValueError):
        total_infidelity(sources, "max")


def test_product_never_exceeds_sum():
    sources = published_sources()
    assert total_infidelity(sources, "product") <= total_infidelity(sources, "sum")
    assert total_infidelity(sources[::-1]) == pytest.approx(total_infidelity(sources))


# ── SNR ───────────────────────────────────────────────────────────────────────
@pytest.mark.parametrize(
    "signal, noise, snr, p",
    [
        (0.2, 0.007, 0.2 / 0.007, 0.007 / 0.207),
        (1.0, 1.0, 1.0, 0.5),
        (1.0, 0.0, math.inf, 0.0),
    ],
)
def test_snr_and_noise_fraction(signal, noise, snr, p):
    got_snr, got_p = snr_and_noise_rate(signal, noise)
    assert got_snr == pytest.approx(snr)
    assert got_p == pytest.approx(p)


def test_snr_rejects_nonpositive_signal():
    with pytest.raises(ValueError):
        snr_and_noise_rate(0.0, 0.1)
    with pytest.raises(ValueError):
        snr_and_noise_rate(1.0, -0.1)


# ── Ledger ────────────────────────────────────────────────────────────────────
def test_published_ledger_total():
    rows = build_error_ledger()
    assert len(rows) == 10
    assert ledger_total(rows, BudgetTables()) == pytest.approx(0.106, abs=0.001)


def test_modelled_column_needs_every_row():
    rows = build_error_ledger({"qfc": 0.0268})
    assert rows[4].modelled == 0.0268
    assert rows[4].model_ref == "photon_chain.qfc_channel"
    with pytest.raises(ValueError, match="modelled"):
        ledger_total(rows, BudgetTables(ledger_source="modelled"))
