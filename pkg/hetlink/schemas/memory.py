"""
schemas/memory.py – AFC quantum-memory parameters.

Holds the comb shape (per polarization), the photon/memory spectral model,
the Stark pulse schedule, the pump plan inputs and the storage channel.
"""

from typing import Annotated

from pydantic import Field, field_validator, model_validator

from hetlink.schemas.base import Section

Probability = Annotated[float, Field(ge=0.0, le=1.0)]

FINESSE_TOL = 1e-6


class CombParams(Section):
    d: float = Field(10.5, gt=0, description="Prepared absorption depth")
    finesse_F: float | None = Field(None, gt=0, description="Δ/γ_comb; derived when omitted")
    gamma_comb: float = Field(259.8, ge=0, description="Comb tooth FWHM (kHz)")
    delta: float = Field(2.0, gt=0, description="Tooth spacing (MHz)")
    bandwidth: float = Field(48.2, gt=0, description="Comb bandwidth (MHz)")

    @model_validator(mode="after")
    def check_geometry(self) -> "CombParams":
        if self.bandwidth <= self.delta:
            raise ValueError(f"bandwidth {self.bandwidth} MHz must exceed tooth spacing {self.delta} MHz")
        if self.finesse_F is None and self.gamma_comb == 0:
            raise ValueError("finesse_F is required when gamma_comb is 0")
        # Only an explicitly supplied spacing can contradict an explicit finesse.
        if (
            self.finesse_F is not None
            and self.gamma_comb > 0
            and "delta" in self.model_fields_set
        ):
            derived = self.delta * 1e3 / self.gamma_comb
            if abs(derived - self.finesse_F) > FINESSE_TOL * self.finesse_F:
                raise ValueError(
                    f"finesse_F={self.finesse_F} contradicts delta/gamma_comb={derived:.6f}"
                )
        return self

    @property
    def finesse(self) -> float:
        if self.finesse_F is not None:
            return self.finesse_F
        return self.delta * 1e3 / self.gamma_comb

    @property
    def echo_period_ns(self) -> float:
        return 1e3 / self.delta


class SpectralModel(Section):
    """Double-Lorentzian photon spectrum against a rectangular memory band (MHz)."""

    gamma_natural: float = Field(19.6, gt=0, description="Natural linewidth Γ (FWHM)")
    zeeman_split: float = Field(11.22, ge=0, description="σ+/σ− separation ω/2π")
    qm_bandwidth: float = Field(48.2, gt=0, description="Memory band B_QM; may be infinite")
    detuning_df: float = 0.0


class StarkControl(Section):
    shift_rate: float | None = Field(
        None, gt=0, description="Mean Stark splitting rate, kHz/(V/cm); None averages the measured pair"
    )
    shift_rate_pos: float = Field(5.74, gt=0, description="Positive sub-ensemble rate")
    shift_rate_neg: float = Field(-5.85, lt=0, description="Negative sub-ensemble rate")
    pulse_voltage: float = Field(8.6, gt=0, description="V")
    pulse_duration: float = Field(100.0, gt=0, description="ns")
    echo_period: float = Field(500.0, gt=0, description="ns; equals 1/Δ")
    readout_order_n: int = Field(2, ge=1, le=10)
    first_pulse_start: float = Field(50.0, ge=0, description="ns after absorption")
    second_pulse_start: float | None = Field(None, description="ns; None centres it in the readout slot")
    second_pulse_reversed: bool = True
    electrode_gap_um: float = Field(100.0, gt=0)

    @property
    def second_pulse_time(self) -> float:
        if self.second_pulse_start is not None:
            return self.second_pulse_start
        return (self.readout_order_n - 0.5) * self.echo_period


class PumpTransition(Section):
    ground: str
    excited: str
    offset: float = Field(..., description="Line start relative to the |5/2⟩g→|1/2⟩e line (MHz)")

    @property
    def label(self) -> str:
        return f"{self.ground}g-{self.excited}e"


# Class IX hyperfine line offsets, consistent with the published pumped regions.
CLASS_IX_TRANSITIONS: tuple[PumpTransition, ...] = (
    PumpTransition(ground="5/2", excited="1/2", offset=0.0),
    PumpTransition(ground="5/2", excited="3/2", offset=159.1),
    PumpTransition(ground="5/2", excited="5/2", offset=431.8),
    PumpTransition(ground="3/2", excited="1/2", offset=148.1),
    PumpTransition(ground="3/2", excited="3/2", offset=307.2),
    PumpTransition(ground="1/2", excited="1/2", offset=224.5),
    PumpTransition(ground="1/2", excited="3/2", offset=383.6),
)


class PumpConfig(Section):
    transitions: tuple[PumpTransition, ...] = CLASS_IX_TRANSITIONS
    line_span: float = Field(497.2, gt=0, description="Inhomogeneous width of every line (MHz)")
    center: float = Field(248.6, description="Target band centre f0 (MHz)")
    side_offset: float = Field(137.0, ge=0, description="Side pumps at f0 ± this (MHz)")
    chirp_bandwidth: float = Field(223.2, gt=0)
    target_bandwidth: float = Field(48.2, gt=0)
    windows: tuple[tuple[float, float], ...] | None = Field(
        None, description="Explicit pump windows; derived from the side pumps when omitted"
    )
    partial_weight: Probability = 0.5
    native_depth: dict[str, float] = Field(default_factory=lambda: {"H": 5.24, "V": 4.66})

    @field_validator("windows")
    @classmethod
    def windows_well_formed(cls, v):
        if v is not None:
            for lo, hi in v:
                if not lo < hi:
                    raise ValueError(f"pump window [{lo}, {hi}] must have lo < hi")
        return v

    def pump_windows(self) -> list[tuple[float, float]]:
        if self.windows is not None:
            return [tuple(w) for w in self.windows]
        half = self.chirp_bandwidth / 2
        lower = self.center - self.side_offset
        upper = self.center + self.side_offset
        return [(round(lower - half, 9), round(lower + half, 9)), (round(upper - half, 9), round(upper + half, 9))]

    def target(self) -> tuple[float, float]:
        half = self.target_bandwidth / 2
        return (round(self.center - half, 9), round(self.center + half, 9))


class MemoryParams(Section):
    # Finesse derives from delta/gamma_comb (≈7.70 for both polarizations).
    comb_h: CombParams = CombParams()
    comb_v: CombParams = CombParams(d=9.0, gamma_comb=259.0)
    spectral: SpectralModel = SpectralModel()
    stark: StarkControl = StarkControl()
    pump: PumpConfig = PumpConfig()
    # Internal storage efficiencies at 1 µs; these set the heralded imbalance.
    eta_h: Probability = 0.310
    eta_v: Probability = 0.289
    storage_infidelity: Probability | None = Field(
        None, description="Residual storage infidelity; None averages input_fidelities"
    )
    input_fidelities: dict[str, float] = Field(
        default_factory=lambda: {"H": 0.9997, "V": 0.9990, "H+V": 0.9981, "H+iV": 0.9934},
        description="Stored-versus-input fidelity for each test polarization",
    )

    @field_validator("input_fidelities")
    @classmethod
    def fidelities_in_range(cls, v: dict[str, float]) -> dict[str, float]:
        if not v:
            raise ValueError("input_fidelities must name at least one input state")
        bad = {k: f for k, f in v.items() if not 0.0 <= f <= 1.0}
        if bad:
            raise ValueError(f"input fidelities {bad} must lie in [0, 1]")
        return v

    @property
    def residual_infidelity(self) -> float:
        if self.storage_infidelity is not None:
            return self.storage_infidelity
        return 1.0 - sum(self.input_fidelities.values()) / len(self.input_fidelities)

    @model_validator(mode="after")
    def check_echo_period(self) -> "MemoryParams":
        period = self.comb_h.echo_period_ns
        if abs(self.stark.echo_period - period) > 1e-6 * period:
            raise ValueError(
                f"stark.echo_period {self.stark.echo_period} ns must equal 1/delta = {period} ns"
            )
        return self

    def comb(self, polarization: str) -> CombParams:
        if polarization not in ("H", "V"):
            raise ValueError(f"Unknown polarization '{polarization}'")
        return self.comb_h if polarization == "H" else self.comb_v
