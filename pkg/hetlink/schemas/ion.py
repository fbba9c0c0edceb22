"""
schemas/ion.py – Trapped-ion node parameters.
"""

import math
from typing import Annotated

from pydantic import Field

from hetlink.schemas.base import Section

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class IonParams(Section):
    zeeman_omega: float = Field(
        2 * math.pi * 11.22e6, gt=0, description="Zeeman splitting as angular frequency (rad/s)"
    )
    coherence_time_tau: float = Field(0.989, gt=0, description="Ramsey coherence time τ_co (ms)")
    decoherence_exponent: float = Field(2.0, ge=1.0, le=3.0, description="Exponent a in exp(−(t/τ)^a)")
    # Spectral calculations use the Γ = 1/(2πτ) = 19.6 MHz lifetime.
    excited_lifetime_tau: float = Field(8.12, gt=0, description="P1/2 lifetime for spectral math (ns)")
    branching_S12: float = Field(0.995, gt=0, le=1, description="P_S1/2: decay back into the qubit manifold")
    # None takes P_π from the excitation fit at its pulse energy.
    pi_excitation_prob: Probability | None = None

    @property
    def natural_linewidth_mhz(self) -> float:
        """Γ = 1/(2πτ) of the P1/2 level."""
        return 1e3 / (2 * math.pi * self.excited_lifetime_tau)


class SpamParams(Section):
    """
    Threshold readout of the ion qubit.

    `background_mean` and `leak_per_scatter` are calibrated from the two
    readout fidelities when left unset.
    """

    mean_bright_counts: float = Field(12.0, gt=0)
    threshold: float = Field(1.5, gt=0)
    dark_fidelity: Probability = 0.998
    bright_fidelity: Probability = 0.987
    background_mean: float | None = Field(None, ge=0)
    leak_per_scatter: Probability | None = None


class ExcitationFit(Section):
    """P_bright = (2A/3)·sin²(α·E^{β/2}/2); defaults put a π pulse at E = 1."""

    A: float = Field(0.960, gt=0, le=1)
    alpha: float = Field(math.pi, gt=0)
    beta: float = Field(1.0, gt=0)
    E: float = Field(1.0, ge=0)


class TimingParams(Section):
    """Photon-to-analysis delays per link stage, plus microwave-map propagation (µs)."""

    mw_propagation_us: float = Field(0.51, ge=0)
    delay_ion_photon_us: float = Field(0.5, ge=0)
    delay_post_qfc_us: float = Field(1.66, ge=0)
    delay_ti_qm_us: float = Field(2.66, ge=0)
