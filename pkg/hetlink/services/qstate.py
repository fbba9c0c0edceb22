"""
services/qstate.py – Core state/channel algebra shared by every module.

Usage:
    rho = DensityMatrix.from_pure(bell_state())
    rho = apply_channel(rho, dephasing_channel(0.99).on_subsystem(0))
    f = fidelity(rho, bell_state())
"""

from __future__ import annotations

import numpy as np

from hetlink.exceptions import DimensionError, StateError
from hetlink.models.channel import QuantumChannel
from hetlink.models.operators import I2, X, Y, Z
from hetlink.models.state import DensityMatrix, Observable, PureState

IMAG_TOL = 1e-10


def tensor_product(a: DensityMatrix | PureState, b: DensityMatrix | PureState):
    """Kronecker product of two states of the same kind (result ≤ 4×4)."""
    if type(a) is not type(b):
        raise TypeError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")
    if a.dim * b.dim > 4:
        raise DimensionError(f"Tensor product dimension {a.dim * b.dim} exceeds two qubits")
    if isinstance(a, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    return DensityMatrix(
        np.kron(a.elements, b.elements),
        subnormalized=a.subnormalized or b.subnormalized,
    )


def fidelity(rho: DensityMatrix, target: PureState) -> float:
    """⟨ψ|ρ|ψ⟩ for a normalized ρ."""
    if rho.dim != target.dim:
        raise DimensionError(f"State dim {rho.dim} does not match target dim {target.dim}")
    if rho.subnormalized and abs(rho.trace - 1.0) > 1e-10:
        raise StateError("Fidelity requires a normalized state; renormalize heralded output first")
    psi = target.amplitudes
    value = complex(psi.conj() @ rho.elements @ psi)
    return float(np.clip(value.real, 0.0, 1.0))


def apply_channel(rho: DensityMatrix, ch: QuantumChannel) -> DensityMatrix:
    if rho.dim != ch.dim:
        raise DimensionError(f"State dim {rho.dim} does not match channel dim {ch.dim}")
    out = sum(k @ rho.elements @ k.conj().T for k in ch.kraus_ops)
    return DensityMatrix(out, subnormalized=rho.subnormalized or not ch.trace_preserving)


def herald(rho: DensityMatrix, ch: QuantumChannel) -> tuple[DensityMatrix, float]:
    """Apply a trace-decreasing channel and post-select: (renormalized state, success prob)."""
    out = apply_channel(rho, ch)
    prob = out.trace / rho.trace
    if prob <= 0:
        raise StateError(f"Heralding channel '{ch.name}' never succeeds on this input")
    return out.normalized(), prob


def expectation(rho: DensityMatrix, obs: Observable) -> float:
    if rho.dim != obs.dim:
        raise DimensionError(f"State dim {rho.dim} does not match observable dim {obs.dim}")
    value = complex(np.trace(rho.elements @ obs.matrix))
    if abs(value.imag) > IMAG_TOL:
        raise StateError(f"Expectation value has imaginary part {value.imag:.2e}")
    return value.real


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state of subsystem `keep` (0 = ion, 1 = photon)."""
    if rho.dim != 4:
        raise DimensionError("Partial trace requires a two-qubit state")
    if keep not in (0, 1):
        raise DimensionError(f"Invalid subsystem index {keep}")
    t = rho.elements.reshape(2, 2, 2, 2)
    reduced = np.einsum("ijkj->ik", t) if keep == 0 else np.einsum("ijil->jl", t)
    return DensityMatrix(reduced, subnormalized=rho.subnormalized)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.dim != b.dim:
        raise DimensionError(f"Cannot compare dim {a.dim} with dim {b.dim}")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a.elements - b.elements)).sum())


# ── Reference states ──────────────────────────────────────────────────────────
def bell_state(phi: float = 0.0) -> PureState:
    """(|1'⟩|σ+⟩ + e^{iφ}|1⟩|σ−⟩)/√2 in the shared basis ordering."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = 1.0
    vec[3] = np.exp(1j * phi)
    return PureState(vec / np.sqrt(2))


def werner_state(p: float, target: PureState | None = None) -> DensityMatrix:
    """p·|ψ⟩⟨ψ| + (1−p)·I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner visibility must be in [0, 1], got {p}")
    target = target or bell_state()
    return DensityMatrix(p * target.projector() + (1 - p) * np.eye(4) / 4)


def werner_visibility(fidelity_to_target: float) -> float:
    """Visibility of the Werner state with the same Bell fidelity, (4F−1)/3 clipped to [0, 1]."""
    return min(1.0, max(0.0, (4 * fidelity_to_target - 1) / 3))


# ── Elementary channels ───────────────────────────────────────────────────────
def dephasing_channel(coherence: float) -> QuantumChannel:
    """Single-qubit phase damping that scales off-diagonals by `coherence`."""
    if not 0.0 <= coherence <= 1.0:
        raise ValueError(f"Coherence factor must be in [0, 1], got {coherence}")
    p = (1 - coherence) / 2
    return QuantumChannel.from_mixture([(1 - p, I2), (p, Z)], name="dephasing")


def bit_flip_channel(eps: float) -> QuantumChannel:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"Flip probability must be in [0, 1], got {eps}")
    return QuantumChannel.from_mixture([(1 - eps, I2), (eps, X)], name="bit_flip")


def phase_flip_channel(eps: float) -> QuantumChannel:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"Flip probability must be in [0, 1], got {eps}")
    return QuantumChannel.from_mixture([(1 - eps, I2), (eps, Z)], name="phase_flip")


def pauli_depolarizing_channel(p: float) -> QuantumChannel:
    """Single-qubit Pauli channel with probability p/3 for each of X, Y, Z."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Depolarizing probability must be in [0, 1], got {p}")
    return QuantumChannel.from_mixture(
        [(1 - p, I2), (p / 3, X), (p / 3, Y), (p / 3, Z)], name="depolarizing"
    )


def white_noise_channel(q: float, dim: int = 4) -> QuantumChannel:
    """ρ ↦ (1−q)ρ + q·I/dim, written as a uniform Pauli-string mixture."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"Noise fraction must be in [0, 1], got {q}")
    paulis = (I2, X, Y, Z)
    strings = list(paulis) if dim == 2 else [np.kron(a, b) for a in paulis for b in paulis]
    n = len(strings)
    terms = [(1 - q + q / n, strings[0])] + [(q / n, s) for s in strings[1:]]
    return QuantumChannel.from_mixture(terms, name="white_noise")
