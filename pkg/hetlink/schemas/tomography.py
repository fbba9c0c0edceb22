"""
schemas/tomography.py – Measurement settings, count records, estimator options.
"""

from typing import Literal

from pydantic import Field, model_validator

from hetlink.schemas.base import Section

Axis = Literal["Z", "X", "Y"]
AXES: tuple[str, ...] = ("Z", "X", "Y")
OUTCOMES: tuple[str, ...] = ("pp", "pm", "mp", "mm")


class MeasurementSetting(Section):
    """Ion axis × photon axis; photon Z = H/V, X = ±45°, Y = circular."""

    ion_axis: Axis
    photon_axis: Axis

    @property
    def key(self) -> tuple[str, str]:
        return (self.ion_axis, self.photon_axis)


MUB_GRID: tuple[MeasurementSetting, ...] = tuple(
    MeasurementSetting(ion_axis=a, photon_axis=b) for a in AXES for b in AXES
)


class CountRecord(Section):
    """
    Outcome counts (++, +−, −+, −−) for one setting. Counts may be fractional
    when they hold exact expected values rather than samples.
    """

    setting: MeasurementSetting
    counts: tuple[float, float, float, float]
    shots: int = Field(..., gt=0)

    @model_validator(mode="after")
    def counts_match_shots(self) -> "CountRecord":
        if any(c < 0 for c in self.counts):
            raise ValueError(f"counts must be nonnegative, got {self.counts}")
        total = sum(self.counts)
        if abs(total - self.shots) > 1e-6 * self.shots:
            raise ValueError(f"counts sum {total} does not equal shots {self.shots}")
        return self


class TomographyConfig(Section):
    bootstrap_resamples: int = Field(200, ge=100)
    max_iterations: int = Field(10_000, gt=0)
    tolerance: float = Field(1e-10, gt=0, description="Relative log-likelihood improvement")
    dilution: float = Field(0.1, gt=0, le=1)
    per_setting_shots: dict[str, int] | None = Field(
        None, description="Optional 'ZX'-style keys; heralds are split evenly otherwise"
    )


class ChshConfig(Section):
    """
    S is sampled from the modelled ti_qm state unless `visibility` is set, in
    which case a Werner state of that visibility stands in for the link.
    0.823 reproduces the measured S = 2.328.
    """

    visibility: float | None = Field(None, ge=0, le=1)
    angle_mode: Literal["optimal", "fixed"] = "optimal"
