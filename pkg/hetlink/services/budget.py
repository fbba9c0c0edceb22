"""
services/budget.py – Rate chains, end-to-end efficiencies, SNR and the
infidelity ledger.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence

import structlog

from hetlink.schemas.budget import (
    PUBLISHED_LEDGER,
    BudgetTables,
    EfficiencyStage,
    ErrorSource,
    NamedScalar,
    RateChain,
)
from hetlink.schemas.ion import ExcitationFit, IonParams
from hetlink.schemas.report import LedgerRow, RateRow
from hetlink.services.ion_node import excitation_probability

log = structlog.get_logger(__name__)

# Operation that models each ledger row.
MODEL_REFS: dict[str, str] = {
    "ion_decoherence": "ion_node.decoherence_channel",
    "arrival_time_jitter": "photon_chain.jitter_dephasing_channel",
    "ion_spam": "photon_chain.spam_channel",
    "mw_rotation": "photon_chain.mw_rotation_channel",
    "qfc": "photon_chain.qfc_channel",
    "pulse_excitation": "photon_chain.white_noise_error_channel",
    "pi_photon_collection": "photon_chain.white_noise_error_channel",
    "dark_noise": "photon_chain.dark_noise_admixture",
    "photon_state_detection": "photon_chain.pbs_bitflip_channel",
    "qm_storage": "memory_node.storage_channel",
}


# ── Generic arithmetic ────────────────────────────────────────────────────────
def end_to_end_efficiency(stages: Sequence[EfficiencyStage], polarization: str | None = None) -> float:
    """Product of stage values; polarization pairs are averaged unless one is selected."""
    if not stages:
        raise ValueError("end_to_end_efficiency needs at least one stage")
    return math.prod(s.value_for(polarization) for s in stages)


def rate(chain: RateChain, polarization: str | None = None) -> float:
    """repetition_rate × prefactors × stage values (Hz)."""
    if not chain.stages and not chain.prefactors:
        raise ValueError("Rate chain has no stages or prefactors")
    stages = end_to_end_efficiency(chain.stages, polarization) if chain.stages else 1.0
    return chain.repetition_rate * math.prod(p.value for p in chain.prefactors) * stages


def total_infidelity(sources: Iterable[ErrorSource], mode: str = "sum") -> float:
    values = [s.infidelity for s in sources]
    if not values:
        raise ValueError("total_infidelity needs at least one error source")
    if mode == "sum":
        return sum(values)
    if mode == "product":
        return 1.0 - math.prod(1.0 - v for v in values)
    raise ValueError(f"Unknown composition mode '{mode}'")


def snr_and_noise_rate(signal_rate: float, noise_rate: float) -> tuple[float, float]:
    """(SNR, noise fraction p = 1/(SNR + 1)); zero noise gives (inf, 0)."""
    if signal_rate <= 0:
        raise ValueError(f"signal_rate must be > 0, got {signal_rate}")
    if noise_rate < 0:
        raise ValueError(f"noise_rate must be ≥ 0, got {noise_rate}")
    if noise_rate == 0:
        return math.inf, 0.0
    snr = signal_rate / noise_rate
    return snr, 1.0 / (snr + 1.0)


# ── Default chains ────────────────────────────────────────────────────────────
def pi_probability(ion: IonParams, excitation: ExcitationFit) -> float:
    """Configured P_π, or the excitation fit evaluated at its pulse energy."""
    if ion.pi_excitation_prob is not None:
        return ion.pi_excitation_prob
    return excitation_probability(excitation)


def _prefactors(t: BudgetTables, ion: IonParams, excitation: ExcitationFit) -> tuple[NamedScalar, ...]:
    return (
        NamedScalar(name="branching", value=t.branching_ratio),
        NamedScalar(name="P_pi", value=pi_probability(ion, excitation)),
    )


def _ion_stages(t: BudgetTables, ion: IonParams) -> tuple[EfficiencyStage, ...]:
    return (EfficiencyStage(name="P_S1/2", value=ion.branching_S12),) + t.ion_stages


def _converted_ion_stages(t: BudgetTables, ion: IonParams) -> tuple[EfficiencyStage, ...]:
    """Ion collection stages with the 369-nm detector swapped for the 580-nm one."""
    return tuple(
        EfficiencyStage(name="QE_580", value=t.qe_580) if s.name == "QE_369" else s
        for s in _ion_stages(t, ion)
    )


def r369_chain(t: BudgetTables, ion: IonParams, excitation: ExcitationFit) -> RateChain:
    return RateChain(
        stages=_ion_stages(t, ion),
        repetition_rate=t.rep_rate_ion_photon,
        prefactors=_prefactors(t, ion, excitation),
    )


def r580_chain(t: BudgetTables, ion: IonParams, excitation: ExcitationFit) -> RateChain:
    return RateChain(
        stages=_converted_ion_stages(t, ion) + t.qfc_stages,
        repetition_rate=t.rep_rate_post_qfc,
        prefactors=_prefactors(t, ion, excitation),
    )


def r_ti_qm_chain(t: BudgetTables, ion: IonParams, excitation: ExcitationFit) -> RateChain:
    return RateChain(
        stages=_converted_ion_stages(t, ion) + t.qfc_stages + t.qm_stages,
        repetition_rate=t.rep_rate_ti_qm,
        prefactors=_prefactors(t, ion, excitation),
    )


def rate_rows(t: BudgetTables, ion: IonParams, excitation: ExcitationFit) -> list[RateRow]:
    pol = t.polarization
    snr, p_noise = snr_and_noise_rate(t.signal_rate_hz, t.noise_rate_hz)
    rows = [
        RateRow(name="R_369", value=rate(r369_chain(t, ion, excitation), pol), unit="Hz"),
        RateRow(name="R_580", value=rate(r580_chain(t, ion, excitation), pol), unit="Hz"),
        RateRow(name="R_TI-QM", value=rate(r_ti_qm_chain(t, ion, excitation), pol), unit="Hz"),
        RateRow(name="eta_QFC", value=end_to_end_efficiency(t.qfc_stages, pol), unit="fraction"),
        RateRow(name="eta_QM", value=end_to_end_efficiency(t.qm_stages, pol), unit="fraction"),
        RateRow(name="eta_total", value=end_to_end_efficiency(t.qfc_stages + t.qm_stages, pol), unit="fraction"),
        RateRow(name="SNR", value=snr, unit="ratio"),
        RateRow(name="noise_fraction", value=p_noise, unit="fraction"),
    ]
    log.debug("rates_computed", polarization=pol, r_ti_qm=rows[2].value)
    return rows


# ── Ledger ────────────────────────────────────────────────────────────────────
def published_sources() -> list[ErrorSource]:
    return [ErrorSource(name=n, infidelity=v, model_ref=MODEL_REFS.get(n)) for n, v in PUBLISHED_LEDGER]


def build_error_ledger(modelled: Mapping[str, float] | None = None) -> list[LedgerRow]:
    """Published rows side by side with the channel-model value of each row."""
    modelled = modelled or {}
    return [
        LedgerRow(name=n, published=v, modelled=modelled.get(n), model_ref=MODEL_REFS.get(n))
        for n, v in PUBLISHED_LEDGER
    ]


def ledger_total(rows: Sequence[LedgerRow], t: BudgetTables) -> float:
    """Total infidelity over the published or the modelled column."""
    column = t.ledger_source
    sources = []
    for row in rows:
        value = row.published if column == "published" else row.modelled
        if value is None:
            raise ValueError(f"Ledger row '{row.name}' has no {column} value")
        sources.append(ErrorSource(name=row.name, infidelity=value, model_ref=row.model_ref))
    return total_infidelity(sources, t.mode)
