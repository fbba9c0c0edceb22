"""
services/chsh.py – CHSH parameter, analyzer settings and a sampled estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hetlink.exceptions import StateError
from hetlink.models.operators import PAULI_BASIS, X, Z, bloch_observable
from hetlink.models.state import DensityMatrix, Observable
from hetlink.services.qstate import expectation
from hetlink.services.rng import RngLike, as_generator

TSIRELSON = 2 * math.sqrt(2)


@dataclass(frozen=True)
class ChshSettings:
    """Ion observables A0, A1 and photon observables B0, B1, each ±1-valued."""

    a0: Observable
    a1: Observable
    b0: Observable
    b1: Observable

    def __post_init__(self) -> None:
        for name in ("a0", "a1", "b0", "b1"):
            obs = getattr(self, name)
            if obs.dim != 2:
                raise StateError(f"CHSH setting {name} must be a single-qubit observable")
            if not obs.is_dichotomic():
                raise StateError(f"CHSH setting {name} must have eigenvalues ±1")

    @classmethod
    def from_vectors(cls, a0, a1, b0, b1) -> ChshSettings:
        return cls(*(Observable(bloch_observable(np.asarray(v) / np.linalg.norm(v))) for v in (a0, a1, b0, b1)))

    def pairs(self) -> tuple[tuple[Observable, Observable, int], ...]:
        """(A, B, sign) for the four correlators in S."""
        return ((self.a0, self.b0, 1), (self.a0, self.b1, 1), (self.a1, self.b0, 1), (self.a1, self.b1, -1))


def correlator(rho: DensityMatrix, a: Observable, b: Observable) -> float:
    return expectation(rho, Observable(np.kron(a.matrix, b.matrix)))


def chsh(rho: DensityMatrix, s: ChshSettings) -> float:
    """S = ⟨A0B0⟩ + ⟨A0B1⟩ + ⟨A1B0⟩ − ⟨A1B1⟩."""
    return sum(sign * correlator(rho, a, b) for a, b, sign in s.pairs())


def fixed_chsh_settings() -> ChshSettings:
    """Ion X/Z against photon H/V and ±45°; bounded by 2 on the ideal Bell state."""
    return ChshSettings(Observable(X), Observable(Z), Observable(Z), Observable(X))


def correlation_matrix(rho: DensityMatrix) -> np.ndarray:
    """T_ij = Tr(ρ σ_i ⊗ σ_j) over i, j ∈ {X, Y, Z}."""
    sigmas = PAULI_BASIS[1:]
    return np.array(
        [[np.trace(rho.elements @ np.kron(si, sj)).real for sj in sigmas] for si in sigmas]
    )


def optimal_chsh_settings(rho: DensityMatrix) -> ChshSettings:
    """Settings attaining 2·√(s1² + s2²) from the two largest singular values of T."""
    u, s, vt = np.linalg.svd(correlation_matrix(rho))
    norm = math.hypot(s[0], s[1])
    if norm < 1e-12:
        return fixed_chsh_settings()
    a0 = (s[0] * u[:, 0] + s[1] * u[:, 1]) / norm
    a1 = (s[0] * u[:, 0] - s[1] * u[:, 1]) / norm
    return ChshSettings.from_vectors(a0, a1, vt[0], vt[1])


def max_chsh(rho: DensityMatrix) -> float:
    s = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    return 2 * math.hypot(s[0], s[1])


def _pair_probabilities(rho: DensityMatrix, a: Observable, b: Observable) -> np.ndarray:
    eye = np.eye(2)
    projs = [np.kron((eye + sa * a.matrix) / 2, (eye + sb * b.matrix) / 2) for sa in (1, -1) for sb in (1, -1)]
    p = np.array([np.trace(rho.elements @ pr).real for pr in projs])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def simulate_chsh(rho: DensityMatrix, s: ChshSettings, trials: int, rng: RngLike) -> tuple[float, float]:
    """
    Sample `trials` heralded events split evenly over the four setting pairs;
    returns (S, standard error).
    """
    if trials < 4:
        raise ValueError(f"Need at least one trial per setting pair, got {trials}")
    gen = as_generator(rng)
    base, extra = divmod(trials, 4)
    total, var = 0.0, 0.0
    for i, (a, b, sign) in enumerate(s.pairs()):
        n = base + (1 if i < extra else 0)
        counts = gen.multinomial(n, _pair_probabilities(rho, a, b))
        e = float(counts[0] - counts[1] - counts[2] + counts[3]) / n
        total += sign * e
        var += (1 - e * e) / n
    return total, math.sqrt(var)
