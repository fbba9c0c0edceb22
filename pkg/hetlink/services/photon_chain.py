"""
services/photon_chain.py – Everything between emission and detection.

Timing jitter, PBS leakage, detection noise, the frequency-conversion
process (χ matrix ↔ Kraus) and the scalar error channels that are
calibrated to a target Bell-state infidelity.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import structlog

from hetlink.exceptions import ChannelError, DimensionError
from hetlink.models.channel import ProcessMatrix, QuantumChannel
from hetlink.models.operators import PAULI_BASIS
from hetlink.models.state import DensityMatrix
from hetlink.schemas.photon import JitterParams, NoiseParams, QfcParams
from hetlink.services.qstate import (
    bit_flip_channel,
    dephasing_channel,
    pauli_depolarizing_channel,
    white_noise_channel,
)

log = structlog.get_logger(__name__)

STORED_CHI = Path(__file__).resolve().parents[1] / "data" / "qfc_process_matrix.json"
KRAUS_EIG_CUTOFF = 1e-12


# ── Jitter ────────────────────────────────────────────────────────────────────
def jitter_total_rms(p: JitterParams) -> float:
    return math.hypot(p.awg_rms, p.transceiver_rms)


def jitter_phase_uncertainty(p: JitterParams) -> float:
    """ΔΦ = t_rms·ω (rad)."""
    return jitter_total_rms(p) * 1e-9 * p.zeeman_omega


def jitter_dephasing_channel(p: JitterParams) -> QuantumChannel:
    dphi = jitter_phase_uncertainty(p)
    ch = dephasing_channel(math.exp(-(dphi**2) / 2)).on_subsystem(0)
    return QuantumChannel(ch.kraus_ops, name="arrival_time_jitter")


# ── Polarization analysis and detection noise ─────────────────────────────────
def pbs_bitflip_channel(extinction: float) -> QuantumChannel:
    """Photon bit flip with ε = 1/extinction (∞ extinction → identity)."""
    if extinction < 1:
        raise ValueError(f"Extinction ratio must be ≥ 1, got {extinction}")
    eps = 0.0 if math.isinf(extinction) else 1.0 / extinction
    ch = bit_flip_channel(eps).on_subsystem(1)
    return QuantumChannel(ch.kraus_ops, name="photon_state_detection")


def noise_fraction(snr: float) -> float:
    """p = 1/(SNR+1); an infinite SNR means no noise."""
    if snr < 0:
        raise ValueError(f"SNR must be ≥ 0, got {snr}")
    return 0.0 if math.isinf(snr) else 1.0 / (snr + 1.0)


def dark_noise_admixture(rho: DensityMatrix, snr: float) -> DensityMatrix:
    if rho.dim != 4:
        raise DimensionError("Dark-noise admixture acts on two-qubit states")
    p = noise_fraction(snr)
    return DensityMatrix((1 - p) * rho.elements + p * np.eye(4) / 4)


def window_efficiency(p: NoiseParams) -> float:
    """Fraction of the exponential emission captured by the detection window."""
    return 1.0 - math.exp(-p.window_ns / p.lifetime_ns)


# ── Process matrices ──────────────────────────────────────────────────────────
def process_matrix_channel(chi: ProcessMatrix) -> QuantumChannel:
    """Kraus form of a χ matrix: Kᵢ = √λᵢ Σⱼ vᵢⱼ Pⱼ."""
    vals, vecs = np.linalg.eigh(chi.chi)
    ops = [
        math.sqrt(lam) * sum(vecs[j, i] * PAULI_BASIS[j] for j in range(4))
        for i, lam in enumerate(vals)
        if lam > KRAUS_EIG_CUTOFF
    ]
    return QuantumChannel(tuple(ops), name="qfc_process")


def process_tomography(channel: QuantumChannel) -> ProcessMatrix:
    """χ of a single-qubit channel by projecting its superoperator on Pₘ ⊗ P̄ₙ."""
    if channel.dim != 2:
        raise DimensionError("Process tomography is single-qubit only")
    if not channel.trace_preserving:
        raise ChannelError("Process matrices describe trace-preserving maps only")
    sup = channel.superoperator()
    chi = np.empty((4, 4), dtype=complex)
    for m, pm in enumerate(PAULI_BASIS):
        for n, pn in enumerate(PAULI_BASIS):
            basis = np.kron(pm, pn.conj())
            chi[m, n] = np.trace(basis.conj().T @ sup) / 4
    return ProcessMatrix(chi)


def depolarizing_process_matrix(process_fidelity: float) -> ProcessMatrix:
    """χ = diag(F, (1−F)/3, (1−F)/3, (1−F)/3)."""
    if not 0.0 <= process_fidelity <= 1.0:
        raise ValueError(f"Process fidelity must be in [0, 1], got {process_fidelity}")
    rest = (1 - process_fidelity) / 3
    return ProcessMatrix(np.diag([process_fidelity, rest, rest, rest]))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def process_fidelity(chi: ProcessMatrix, chi_ideal: ProcessMatrix) -> float:
    """Uhlmann fidelity between χ matrices viewed as states; ⟨v|χ|v⟩ for rank-1 ideals."""
    root = _psd_sqrt(chi_ideal.chi)
    inner = root @ chi.chi @ root
    value = float(np.sqrt(np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)).sum() ** 2)
    return min(max(value, 0.0), 1.0)


def load_process_matrix(path: Path) -> ProcessMatrix:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ChannelError(f"Cannot read process matrix from {path}: {exc}") from exc
    return ProcessMatrix.from_json_dict(payload)


def qfc_process_matrix(p: QfcParams) -> ProcessMatrix:
    if p.chi_file is not None:
        chi = load_process_matrix(p.chi_file)
        log.info("qfc_chi_loaded", path=str(p.chi_file))
        return chi
    return depolarizing_process_matrix(p.process_fidelity)


def qfc_channel(p: QfcParams) -> QuantumChannel:
    ch = process_matrix_channel(qfc_process_matrix(p)).on_subsystem(1)
    return QuantumChannel(ch.kraus_ops, name="qfc")


# ── Scalar error sources ──────────────────────────────────────────────────────
# Each channel is calibrated so that acting on the ideal Bell state it leaves
# fidelity 1 − ε.
def spam_channel(eps: float) -> QuantumChannel:
    """Ion readout error as an ion bit flip."""
    ch = bit_flip_channel(eps).on_subsystem(0)
    return QuantumChannel(ch.kraus_ops, name="ion_spam")


def mw_rotation_channel(eps: float) -> QuantumChannel:
    """Imperfect microwave mapping as ion depolarizing noise."""
    ch = pauli_depolarizing_channel(eps).on_subsystem(0)
    return QuantumChannel(ch.kraus_ops, name="mw_rotation")


def white_noise_error_channel(eps: float, name: str) -> QuantumChannel:
    """Two-qubit white noise with Bell infidelity ε (q = 4ε/3)."""
    if not 0.0 <= eps <= 0.75:
        raise ValueError(f"White-noise infidelity must be in [0, 0.75], got {eps}")
    ch = white_noise_channel(4 * eps / 3)
    return QuantumChannel(ch.kraus_ops, name=name)
