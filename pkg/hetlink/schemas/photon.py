"""
schemas/photon.py – Photon-chain parameters: jitter, detection noise, QFC.
"""

import math
from pathlib import Path

from pydantic import Field

from hetlink.schemas.base import Section


class JitterParams(Section):
    awg_rms: float = Field(0.305, ge=0, description="AWG timing jitter (ns RMS)")
    transceiver_rms: float = Field(0.056, ge=0, description="Optical transceiver jitter (ns RMS)")
    zeeman_omega: float = Field(2 * math.pi * 11.22e6, gt=0, description="rad/s")


class NoiseParams(Section):
    snr: float = Field(28.0, gt=0, description="580-nm SNSPD signal-to-noise ratio")
    snr_369: float = Field(1800.0, gt=0, description="369-nm PMT signal-to-noise ratio")
    pbs_extinction: float = Field(3500.0, ge=1)
    window_ns: float = Field(30.0, ge=0)
    lifetime_ns: float = Field(8.05, gt=0, description="P1/2 lifetime for temporal-window math")


class QfcParams(Section):
    """
    Frequency-conversion process. A stored χ file takes precedence; otherwise
    a depolarizing χ with `process_fidelity` is synthesized.

    0.969 is the first-five-hour average of the long run; 0.9732 (3-minute)
    and 0.955 (10-hour) are the other measured values.
    """

    process_fidelity: float = Field(0.969, ge=0.25, le=1.0)
    chi_file: Path | None = None
