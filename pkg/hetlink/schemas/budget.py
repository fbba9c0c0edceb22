"""
schemas/budget.py – Efficiency stages, rate chains and the error ledger inputs.
"""

from typing import Literal

from pydantic import Field, field_validator, model_validator

from hetlink.schemas.base import Section


class EfficiencyStage(Section):
    name: str
    value: float = Field(..., gt=0, le=1)
    polarization_dependent: tuple[float, float] | None = Field(None, description="(η_H, η_V)")

    @field_validator("polarization_dependent")
    @classmethod
    def pair_in_range(cls, v):
        if v is not None and not all(0 < x <= 1 for x in v):
            raise ValueError(f"polarization pair {v} must lie in (0, 1]")
        return v

    def value_for(self, polarization: str | None) -> float:
        """Stage value for 'H', 'V', or the (H,V) mean when polarization is None."""
        if self.polarization_dependent is None:
            return self.value
        eta_h, eta_v = self.polarization_dependent
        if polarization is None:
            return (eta_h + eta_v) / 2
        if polarization == "H":
            return eta_h
        if polarization == "V":
            return eta_v
        raise ValueError(f"Unknown polarization '{polarization}'")


class NamedScalar(Section):
    name: str
    value: float = Field(..., gt=0)


class RateChain(Section):
    stages: tuple[EfficiencyStage, ...] = ()
    repetition_rate: float = Field(..., gt=0, description="Hz")
    prefactors: tuple[NamedScalar, ...] = ()


class ErrorSource(Section):
    name: str
    infidelity: float = Field(..., ge=0, le=1)
    model_ref: str | None = Field(None, description="Operation that models the row, if any")


def _stage(name: str, value: float, pair: tuple[float, float] | None = None) -> EfficiencyStage:
    return EfficiencyStage(name=name, value=value, polarization_dependent=pair)


class BudgetTables(Section):
    # ── Repetition rates of the three link stages (Hz) ───────────────────────
    rep_rate_ion_photon: float = Field(250e3, gt=0)
    rep_rate_post_qfc: float = Field(194e3, gt=0)
    rep_rate_ti_qm: float = Field(162e3, gt=0)

    # ── 369-nm detection chain ────────────────────────────────────────────────
    branching_ratio: float = Field(2 / 3, gt=0, le=1)
    # The chains prepend P_S1/2 from ion.branching_S12.
    ion_stages: tuple[EfficiencyStage, ...] = (
        _stage("QE_369", 0.35),
        _stage("T_fiber1", 0.27),
        _stage("T_optics", 0.9),
        # Solid angle of the objective; 0.0999 is what R_369 = 1352 Hz implies.
        _stage("E_objective", 0.0999),
    )
    qe_580: float = Field(0.8, gt=0, le=1)

    # ── Conversion and memory stages ──────────────────────────────────────────
    qfc_stages: tuple[EfficiencyStage, ...] = (
        _stage("eta_369", 0.708),
        _stage("eta_conv", 0.00725, (0.0070, 0.0075)),
        _stage("T_580", 0.478),
        _stage("T_fiber2", 0.4),
        _stage("AOM", 0.8),
    )
    qm_stages: tuple[EfficiencyStage, ...] = (
        _stage("eta_bw", 0.74),
        _stage("eta_storage", 0.189, (0.195, 0.183)),
    )
    # Sub-loop pump powers balancing conversion efficiency; metadata only.
    qfc_pump_power_w: tuple[float, float] = (2.00, 2.13)
    polarization: Literal["H", "V"] | None = "H"

    # ── Noise ─────────────────────────────────────────────────────────────────
    signal_rate_hz: float = Field(0.2, gt=0)
    noise_rate_hz: float = Field(0.007, ge=0)

    # ── Ledger ────────────────────────────────────────────────────────────────
    mode: Literal["sum", "product"] = "sum"
    ledger_source: Literal["published", "modelled"] = "published"

    @model_validator(mode="after")
    def stages_present(self) -> "BudgetTables":
        if not self.ion_stages or not self.qfc_stages or not self.qm_stages:
            raise ValueError("ion_stages, qfc_stages and qm_stages must be nonempty")
        return self


class ScalarErrors(Section):
    """Error sources that enter only as calibrated scalars (Bell infidelity)."""

    spam: float = Field(0.007, ge=0, le=1)
    mw_rotation: float = Field(0.001, ge=0, le=1)
    pulse_excitation: float = Field(0.033, ge=0, le=0.75)
    pi_collection: float = Field(0.005, ge=0, le=0.75)


# Published ledger rows (absolute infidelities), in table order.
PUBLISHED_LEDGER: tuple[tuple[str, float], ...] = (
    ("ion_decoherence", 2.6e-6),
    ("arrival_time_jitter", 1.2e-4),
    ("ion_spam", 0.007),
    ("mw_rotation", 0.001),
    ("qfc", 0.031),
    ("pulse_excitation", 0.033),
    ("pi_photon_collection", 0.005),
    ("dark_noise", 0.027),
    ("photon_state_detection", 2.9e-4),
    ("qm_storage", 0.002),
)
