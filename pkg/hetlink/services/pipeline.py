"""
services/pipeline.py – Channel chain for each link stage.

ti_qm order:
    emit → pulse excitation → π-photon collection → ion decoherence
    → arrival-time jitter → QFC → memory storage (heralded) → storage residual
    → PBS analysis → ion SPAM → MW rotation → dark-noise admixture
ion_photon drops QFC and memory; post_qfc drops the memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import structlog

from hetlink.models.channel import QuantumChannel
from hetlink.models.state import DensityMatrix
from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import BreakdownRow
from hetlink.services.ion_node import compensation_phase, decoherence_channel, emit_entangled_state
from hetlink.services.memory_node import storage_channel, storage_residual_channel
from hetlink.services.photon_chain import (
    dark_noise_admixture,
    jitter_dephasing_channel,
    mw_rotation_channel,
    pbs_bitflip_channel,
    qfc_channel,
    spam_channel,
    white_noise_error_channel,
)
from hetlink.services.qstate import apply_channel, bell_state, fidelity, herald

log = structlog.get_logger(__name__)

LINK_STAGES = ("ion_photon", "post_qfc", "ti_qm")


@dataclass(frozen=True)
class PipelineStep:
    name: str
    ledger: str
    channel: QuantumChannel | None = None
    heralded: bool = False
    snr: float | None = None  # set only on the dark-noise step


@dataclass(frozen=True)
class PipelineResult:
    stage: str
    physical_state: DensityMatrix  # before the detection-noise admixture
    state: DensityMatrix
    herald_probability: float
    snr: float
    breakdown: tuple[BreakdownRow, ...]

    @property
    def fidelity(self) -> float:
        return fidelity(self.state, bell_state())


def _delay_us(cfg: ExperimentConfig, stage: str) -> float:
    t = cfg.timing
    delay = {"ion_photon": t.delay_ion_photon_us, "post_qfc": t.delay_post_qfc_us, "ti_qm": t.delay_ti_qm_us}
    return delay[stage] + t.mw_propagation_us


def stage_snr(cfg: ExperimentConfig, stage: str) -> float:
    return cfg.noise.snr_369 if stage == "ion_photon" else cfg.noise.snr


def build_steps(cfg: ExperimentConfig, stage: str) -> list[PipelineStep]:
    if stage not in LINK_STAGES:
        raise ValueError(f"Unknown link stage '{stage}'")
    errs = cfg.errors
    steps = [
        PipelineStep("pulse_excitation", "pulse_excitation",
                     white_noise_error_channel(errs.pulse_excitation, "pulse_excitation")),
        PipelineStep("pi_photon_collection", "pi_photon_collection",
                     white_noise_error_channel(errs.pi_collection, "pi_photon_collection")),
        PipelineStep("ion_decoherence", "ion_decoherence", decoherence_channel(cfg.ion, _delay_us(cfg, stage))),
        PipelineStep("arrival_time_jitter", "arrival_time_jitter", jitter_dephasing_channel(cfg.jitter)),
    ]
    if stage in ("post_qfc", "ti_qm"):
        steps.append(PipelineStep("qfc", "qfc", qfc_channel(cfg.qfc)))
    if stage == "ti_qm":
        mem = cfg.memory
        steps.append(PipelineStep("qm_storage", "qm_storage", storage_channel(mem.eta_h, mem.eta_v), heralded=True))
        steps.append(PipelineStep("qm_storage_residual", "qm_storage", storage_residual_channel(mem.residual_infidelity)))
    steps += [
        PipelineStep("photon_state_detection", "photon_state_detection", pbs_bitflip_channel(cfg.noise.pbs_extinction)),
        PipelineStep("ion_spam", "ion_spam", spam_channel(errs.spam)),
        PipelineStep("mw_rotation", "mw_rotation", mw_rotation_channel(errs.mw_rotation)),
        PipelineStep("dark_noise", "dark_noise", snr=stage_snr(cfg, stage)),
    ]
    return steps


def _apply(rho: DensityMatrix, step: PipelineStep) -> tuple[DensityMatrix, float]:
    if step.snr is not None:
        return dark_noise_admixture(rho, step.snr), 1.0
    if step.heralded:
        return herald(rho, step.channel)
    return apply_channel(rho, step.channel), 1.0


def initial_state(cfg: ExperimentConfig, stage: str) -> DensityMatrix:
    """Emitted state with the Zeeman phase compensated at analysis time."""
    t_ns = _delay_us(cfg, stage) * 1e3
    psi = emit_entangled_state(cfg.ion, t_ns, phi_comp=compensation_phase(cfg.ion, t_ns))
    return DensityMatrix.from_pure(psi)


def propagate(cfg: ExperimentConfig, stage: str) -> PipelineResult:
    target = bell_state()
    rho = initial_state(cfg, stage)
    physical = rho
    prob = 1.0
    prev = fidelity(rho, target)
    rows = []
    for step in build_steps(cfg, stage):
        if step.snr is not None:
            physical = rho
        rho, p = _apply(rho, step)
        prob *= p
        f = fidelity(rho, target)
        rows.append(BreakdownRow(step=step.name, fidelity=f, infidelity_added=prev - f))
        prev = f
    log.debug("pipeline_propagated", stage=stage, fidelity=prev, herald_probability=prob)
    return PipelineResult(
        stage=stage,
        physical_state=physical,
        state=rho,
        herald_probability=prob,
        snr=stage_snr(cfg, stage),
        breakdown=tuple(rows),
    )


def analytic_fidelity(cfg: ExperimentConfig, stage: str) -> float:
    return propagate(cfg, stage).fidelity


def isolated_infidelities(cfg: ExperimentConfig, stage: str = "ti_qm") -> dict[str, float]:
    """Bell infidelity of each ledger row's steps applied alone to the ideal state."""
    groups: dict[str, list[PipelineStep]] = {}
    for step in build_steps(cfg, stage):
        groups.setdefault(step.ledger, []).append(step)
    out = {}
    for ledger, steps in groups.items():
        rho = DensityMatrix.from_pure(bell_state())
        for step in steps:
            rho, _ = _apply(rho, step)
        out[ledger] = 1.0 - fidelity(rho, bell_state())
    return out


def first_order_fidelity(cfg: ExperimentConfig, stage: str = "ti_qm") -> float:
    """1 − Σ isolated infidelities; tracks analytic_fidelity to first order."""
    return 1.0 - math.fsum(isolated_infidelities(cfg, stage).values())
