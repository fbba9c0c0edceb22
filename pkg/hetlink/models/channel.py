"""
models/channel.py – Kraus-form quantum channels and single-qubit process matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from hetlink.exceptions import ChannelError, DimensionError
from hetlink.models.operators import PAULI_BASIS
from hetlink.models.state import ALLOWED_DIMS, matrix_from_json, matrix_to_json

COMPLETENESS_TOL = 1e-9
CHI_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """
    Completely positive map ρ ↦ Σ K ρ K†.

    Trace-preserving channels must satisfy Σ K†K = I; heralded channels
    only Σ K†K ≼ I. The check runs once, here, never at application time.
    """

    kraus_ops: tuple[np.ndarray, ...]
    trace_preserving: bool = True
    name: str = field(default="channel")

    def __post_init__(self) -> None:
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ChannelError(f"Channel '{self.name}' has no Kraus operators")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] not in ALLOWED_DIMS:
            raise DimensionError(f"Kraus operators must be 2×2 or 4×4, got {shape}")
        if any(k.shape != shape for k in ops):
            raise DimensionError(f"Channel '{self.name}' mixes Kraus operator shapes")

        completeness = sum(k.conj().T @ k for k in ops)
        if self.trace_preserving:
            dev = float(np.max(np.abs(completeness - np.eye(shape[0]))))
            if dev > COMPLETENESS_TOL:
                raise ChannelError(
                    f"Channel '{self.name}' is not trace preserving (Σ K†K deviates by {dev:.2e})"
                )
        else:
            top = float(np.linalg.eigvalsh((completeness + completeness.conj().T) / 2).max())
            if top > 1.0 + COMPLETENESS_TOL:
                raise ChannelError(
                    f"Channel '{self.name}' increases trace (largest Σ K†K eigenvalue {top:.12f})"
                )
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    # ── Constructors ──────────────────────────────────────────────────────────
    @classmethod
    def identity(cls, dim: int = 4) -> QuantumChannel:
        return cls((np.eye(dim),), name="identity")

    @classmethod
    def from_mixture(
        cls, terms: Sequence[tuple[float, np.ndarray]], name: str = "mixture"
    ) -> QuantumChannel:
        """Random-unitary channel Σ pᵢ UᵢρUᵢ†; zero-weight terms are dropped."""
        total = sum(p for p, _ in terms)
        if any(p < 0 for p, _ in terms) or abs(total - 1.0) > COMPLETENESS_TOL:
            raise ChannelError(f"Mixture weights for '{name}' must be ≥ 0 and sum to 1")
        ops = tuple(np.sqrt(p) * np.asarray(u, dtype=complex) for p, u in terms if p > 0)
        return cls(ops, name=name)

    def on_subsystem(self, subsystem: int) -> QuantumChannel:
        """Embed a single-qubit channel into the two-qubit space."""
        if self.dim != 2:
            raise DimensionError("Only single-qubit channels can be embedded")
        if subsystem not in (0, 1):
            raise DimensionError(f"Invalid subsystem index {subsystem}")
        eye = np.eye(2)
        ops = tuple(np.kron(k, eye) if subsystem == 0 else np.kron(eye, k) for k in self.kraus_ops)
        return QuantumChannel(ops, self.trace_preserving, name=f"{self.name}[{subsystem}]")

    def then(self, other: QuantumChannel) -> QuantumChannel:
        """Composition: apply self first, then other."""
        if other.dim != self.dim:
            raise DimensionError(f"Cannot compose dim {self.dim} with dim {other.dim}")
        ops = tuple(b @ a for a in self.kraus_ops for b in other.kraus_ops)
        return QuantumChannel(
            ops,
            self.trace_preserving and other.trace_preserving,
            name=f"{self.name}>{other.name}",
        )

    # ── Properties ────────────────────────────────────────────────────────────
    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.kraus_ops)

    def superoperator(self) -> np.ndarray:
        """Row-major vectorized map: vec(E(ρ)) = S·vec(ρ) with S = Σ K ⊗ K̄."""
        return sum(np.kron(k, k.conj()) for k in self.kraus_ops)


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """Single-qubit χ matrix over (I, X, Y, Z): E(ρ) = Σ χₘₙ Pₘ ρ Pₙ."""

    chi: np.ndarray

    def __post_init__(self) -> None:
        chi = np.array(self.chi, dtype=complex)
        if chi.shape != (4, 4):
            raise DimensionError(f"Process matrix must be 4×4, got {chi.shape}")
        if float(np.max(np.abs(chi - chi.conj().T))) > CHI_TOL:
            raise ChannelError("Process matrix is not Hermitian")
        chi = (chi + chi.conj().T) / 2
        if abs(np.trace(chi).real - 1.0) > CHI_TOL:
            raise ChannelError(f"Process matrix trace {np.trace(chi).real:.12f} is not 1")
        min_eig = float(np.linalg.eigvalsh(chi).min())
        if min_eig < -CHI_TOL:
            raise ChannelError(f"Process matrix is not positive semidefinite ({min_eig:.3e})")
        tp = sum(
            chi[m, n] * PAULI_BASIS[n] @ PAULI_BASIS[m] for m in range(4) for n in range(4)
        )
        if float(np.max(np.abs(tp - np.eye(2)))) > CHI_TOL:
            raise ChannelError("Process matrix does not describe a trace-preserving map")
        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    @classmethod
    def identity(cls) -> ProcessMatrix:
        return cls(np.diag([1.0, 0.0, 0.0, 0.0]))

    def to_json_dict(self) -> dict[str, Any]:
        return matrix_to_json(self.chi, basis="pauli-IXYZ")

    @classmethod
    def from_json_dict(cls, payload: dict[str, Any]) -> ProcessMatrix:
        basis = payload.get("basis", "pauli-IXYZ")
        if basis != "pauli-IXYZ":
            raise ChannelError(f"Unsupported process-matrix basis '{basis}'")
        return cls(matrix_from_json(payload))
