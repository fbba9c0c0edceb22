"""
schemas/report.py – Run outputs.

Every statistic is a `Statistic`: either it carries a bootstrap/Monte Carlo
standard deviation or it is tagged exact. Optional sections are explicit
nulls in the serialized report.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hetlink.schemas.tomography import CountRecord


class Statistic(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    value: float
    stddev: float | None = None
    exact: bool = False

    @model_validator(mode="after")
    def uncertainty_or_exact(self) -> "Statistic":
        if self.exact == (self.stddev is not None):
            raise ValueError("a statistic carries either a stddev or the exact tag, not both")
        return self

    @classmethod
    def exact_value(cls, value: float) -> "Statistic":
        return cls(value=value, exact=True)


class RateRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    value: float
    unit: str


class LedgerRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    published: float | None
    modelled: float | None
    model_ref: str | None


class BreakdownRow(BaseModel):
    """Fidelity after each pipeline step and the drop that step caused."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    step: str
    fidelity: float
    infidelity_added: float


class RunReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str
    seed: int
    fidelity: Statistic | None = None
    analytic_fidelity: Statistic | None = None
    chsh: Statistic | None = None
    herald_probability: Statistic | None = None
    matrix: dict[str, Any] | None = None
    rates: list[RateRow] | None = None
    budget: list[LedgerRow] | None = None
    budget_total: Statistic | None = None
    channel_breakdown: list[BreakdownRow] | None = None
    counts: list[CountRecord] | None = None
    sweep: list[dict[str, Any]] | None = None
    pump_plan: list[dict[str, Any]] | None = None
    notes: list[str] = Field(default_factory=list)
    # Wall-clock runtime is logged, never serialized, so reports stay byte-identical.
    runtime_s: float | None = Field(None, exclude=True)
