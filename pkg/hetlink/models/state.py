"""
models/state.py – Density matrices, pure states and observables.

All three are frozen dataclasses whose arrays are made read-only after
validation, so instances can be shared freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from hetlink.exceptions import DimensionError, StateError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_FLOOR = -1e-9
NORM_TOL = 1e-12
ALLOWED_DIMS = (2, 4)


# ── JSON matrix format ────────────────────────────────────────────────────────
def _round15(x: float) -> float:
    # + 0.0 folds negative zero so output bytes do not depend on rounding sign
    return float(f"{x:.15g}") + 0.0


def matrix_to_json(arr: np.ndarray, **extra: Any) -> dict[str, Any]:
    """Serialize a square complex matrix as {dim, re, im} (row-major, 15 s.f.)."""
    arr = np.asarray(arr, dtype=complex)
    payload: dict[str, Any] = {
        "dim": int(arr.shape[0]),
        "re": [[_round15(v) for v in row] for row in arr.real],
        "im": [[_round15(v) for v in row] for row in arr.imag],
    }
    payload.update(extra)
    return payload


def matrix_from_json(payload: dict[str, Any]) -> np.ndarray:
    try:
        dim = int(payload["dim"])
        arr = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"Malformed matrix payload: {exc}") from exc
    if arr.shape != (dim, dim):
        raise DimensionError(f"Matrix payload shape {arr.shape} does not match dim={dim}")
    return arr


def _check_dim(dim: int) -> None:
    if dim not in ALLOWED_DIMS:
        raise DimensionError(f"Only one- and two-qubit objects are supported, got dim={dim}")


# ──────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm state vector."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        vec = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _check_dim(vec.size)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"State vector norm {norm:.15f} is not 1")
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @classmethod
    def from_unnormalized(cls, vec: np.ndarray) -> PureState:
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise StateError("Cannot normalize the zero vector")
        return cls(vec / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Positive semidefinite Hermitian matrix with unit trace.

    `subnormalized=True` admits trace ≤ 1, used for the unnormalized output
    of heralded (trace-decreasing) channels. Eigenvalues in [−1e-9, 0) are
    clipped to zero with the trace kept; anything more negative is rejected.
    """

    elements: np.ndarray
    subnormalized: bool = False

    def __post_init__(self) -> None:
        arr = np.array(self.elements, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"Density matrix must be square, got shape {arr.shape}")
        _check_dim(arr.shape[0])

        herm_dev = float(np.max(np.abs(arr - arr.conj().T)))
        if herm_dev > HERMITIAN_TOL:
            raise StateError(f"Matrix is not Hermitian (max deviation {herm_dev:.2e})")
        arr = (arr + arr.conj().T) / 2

        tr = float(np.trace(arr).real)
        if self.subnormalized:
            if tr > 1.0 + TRACE_TOL or tr < -TRACE_TOL:
                raise StateError(f"Subnormalized state has trace {tr:.12f} outside [0, 1]")
        elif abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"State trace {tr:.12f} is not 1")

        vals, vecs = np.linalg.eigh(arr)
        min_eig = float(vals.min())
        if min_eig < PSD_FLOOR:
            raise StateError(f"State has negative eigenvalue {min_eig:.3e}")
        if min_eig < 0:
            # Round-off negatives are clipped; the trace is kept.
            vals = np.clip(vals, 0.0, None)
            if vals.sum() > 0:
                vals *= tr / vals.sum()
            arr = (vecs * vals) @ vecs.conj().T

        arr.setflags(write=False)
        object.__setattr__(self, "elements", arr)

    # ── Constructors ──────────────────────────────────────────────────────────
    @classmethod
    def from_pure(cls, psi: PureState) -> DensityMatrix:
        return cls(psi.projector())

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> DensityMatrix:
        _check_dim(dim)
        return cls(np.eye(dim) / dim)

    @classmethod
    def project(cls, arr: np.ndarray) -> DensityMatrix:
        """
        Nearest-eigenvalue physical state: symmetrize, clip negative
        eigenvalues to zero, renormalize. Used on estimator output.
        """
        arr = np.asarray(arr, dtype=complex)
        arr = (arr + arr.conj().T) / 2
        vals, vecs = np.linalg.eigh(arr)
        vals = np.clip(vals, 0.0, None)
        if vals.sum() <= 0:
            return cls.maximally_mixed(arr.shape[0])
        vals = vals / vals.sum()
        return cls((vecs * vals) @ vecs.conj().T)

    # ── Properties ────────────────────────────────────────────────────────────
    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.elements)

    @property
    def purity(self) -> float:
        return float(np.trace(self.elements @ self.elements).real)

    def normalized(self) -> DensityMatrix:
        tr = self.trace
        if tr <= 0:
            raise StateError("Cannot renormalize a state with zero trace")
        return DensityMatrix(self.elements / tr)

    # ── JSON ──────────────────────────────────────────────────────────────────
    def to_json_dict(self) -> dict[str, Any]:
        return matrix_to_json(self.elements)

    @classmethod
    def from_json_dict(cls, payload: dict[str, Any]) -> DensityMatrix:
        return cls(matrix_from_json(payload))


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator, e.g. a ±1-valued CHSH setting."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"Observable must be square, got shape {arr.shape}")
        _check_dim(arr.shape[0])
        herm_dev = float(np.max(np.abs(arr - arr.conj().T)))
        if herm_dev > HERMITIAN_TOL:
            raise StateError(f"Observable is not Hermitian (max deviation {herm_dev:.2e})")
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_dichotomic(self, tol: float = 1e-9) -> bool:
        """True when every eigenvalue is ±1."""
        return bool(np.all(np.abs(np.abs(self.eigenvalues) - 1.0) < tol))
