"""
schemas/experiment.py – The scenario config document.

`ExperimentConfig()` with no arguments is the shipped defaults file: every
field defaults to the published value, so `run --scenario ti_qm` reproduces
the headline numbers without a config file.
"""

from pathlib import Path
from typing import Literal

from pydantic import Field, model_validator

from hetlink.schemas.base import Section
from hetlink.schemas.budget import BudgetTables, ScalarErrors
from hetlink.schemas.ion import ExcitationFit, IonParams, SpamParams, TimingParams
from hetlink.schemas.memory import MemoryParams
from hetlink.schemas.photon import JitterParams, NoiseParams, QfcParams
from hetlink.schemas.tomography import ChshConfig, TomographyConfig

Scenario = Literal[
    "ion_photon", "post_qfc", "ti_qm", "chsh", "budget", "afc_sweep", "bandwidth_sweep"
]
SCENARIOS: tuple[str, ...] = Scenario.__args__  # type: ignore[attr-defined]

DEFAULT_SEED = 20240601


class SweepConfig(Section):
    detuning_min: float = -60.0
    detuning_max: float = 60.0
    detuning_step: float = Field(1.0, gt=0)
    storage_min_us: float = Field(0.5, ge=0)
    storage_max_us: float = Field(5.0, gt=0)
    storage_step_us: float = Field(0.5, gt=0)

    @model_validator(mode="after")
    def ranges_ordered(self) -> "SweepConfig":
        if self.detuning_max < self.detuning_min:
            raise ValueError("detuning_max must be ≥ detuning_min")
        if self.storage_max_us < self.storage_min_us:
            raise ValueError("storage_max_us must be ≥ storage_min_us")
        return self


class ExperimentConfig(Section):
    scenario: Scenario = "ti_qm"
    master_seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    output_dir: Path = Path("runs")
    heralds: dict[str, int] = Field(
        default_factory=lambda: {
            "ion_photon": 62_723,
            "post_qfc": 2_714,
            "ti_qm": 1_780,
            "chsh": 3_634,
        }
    )

    # ── Physical sections ─────────────────────────────────────────────────────
    ion: IonParams = IonParams()
    spam: SpamParams = SpamParams()
    excitation: ExcitationFit = ExcitationFit()
    timing: TimingParams = TimingParams()
    jitter: JitterParams = JitterParams()
    noise: NoiseParams = NoiseParams()
    qfc: QfcParams = QfcParams()
    memory: MemoryParams = MemoryParams()
    errors: ScalarErrors = ScalarErrors()
    budget: BudgetTables = BudgetTables()

    # ── Analysis ──────────────────────────────────────────────────────────────
    tomography: TomographyConfig = TomographyConfig()
    chsh: ChshConfig = ChshConfig()
    sweep: SweepConfig = SweepConfig()

    @model_validator(mode="after")
    def check_cross_sections(self) -> "ExperimentConfig":
        for name, count in self.heralds.items():
            if name not in SCENARIOS:
                raise ValueError(f"heralds has unknown scenario '{name}'")
            if count <= 0:
                raise ValueError(f"heralds[{name}] must be positive, got {count}")
        if self.scenario in ("ion_photon", "post_qfc", "ti_qm", "chsh") and self.scenario not in self.heralds:
            raise ValueError(f"heralds must define a count for scenario '{self.scenario}'")
        omega_ion, omega_jit = self.ion.zeeman_omega, self.jitter.zeeman_omega
        if abs(omega_ion - omega_jit) > 1e-9 * omega_ion:
            raise ValueError("jitter.zeeman_omega must equal ion.zeeman_omega")
        gamma_ion, gamma_mem = self.ion.natural_linewidth_mhz, self.memory.spectral.gamma_natural
        if abs(gamma_ion - gamma_mem) > 0.01 * gamma_ion:
            raise ValueError(
                f"memory.spectral.gamma_natural {gamma_mem} MHz must match the ion lifetime "
                f"(1/(2π·{self.ion.excited_lifetime_tau} ns) = {gamma_ion:.2f} MHz)"
            )
        return self

    def heralds_for(self, scenario: str | None = None) -> int:
        return self.heralds[scenario or self.scenario]
