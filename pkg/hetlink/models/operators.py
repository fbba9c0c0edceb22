"""
models/operators.py – Fixed single-qubit operators and basis vectors.

Basis ordering shared by every module:
  ion    : index 0 = |1'⟩ (|0⟩ after the microwave map), index 1 = |1⟩
  photon : index 0 = |σ+⟩ ≡ |H⟩,                      index 1 = |σ−⟩ ≡ |V⟩
Two-qubit index = 2·ion + photon (ion is subsystem 0). Index 0 is the +1
eigenvector of Z for both qubits.
"""

from types import MappingProxyType

import numpy as np


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


I2 = _frozen(np.eye(2))
X = _frozen([[0, 1], [1, 0]])
Y = _frozen([[0, -1j], [1j, 0]])
Z = _frozen([[1, 0], [0, -1]])

# Order matters: process matrices are indexed over (I, X, Y, Z).
PAULI_BASIS: tuple[np.ndarray, ...] = (I2, X, Y, Z)
PAULIS = MappingProxyType({"I": I2, "X": X, "Y": Y, "Z": Z})

_S = 1 / np.sqrt(2)

# (+1 eigenvector, −1 eigenvector) per measurement axis.
AXIS_EIGENVECTORS = MappingProxyType(
    {
        "Z": (_frozen([1, 0]), _frozen([0, 1])),
        "X": (_frozen([_S, _S]), _frozen([_S, -_S])),
        "Y": (_frozen([_S, 1j * _S]), _frozen([_S, -1j * _S])),
    }
)


def ket(index: int, dim: int = 2) -> np.ndarray:
    """Computational basis vector |index⟩."""
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return vec


def axis_projectors(axis: str) -> tuple[np.ndarray, np.ndarray]:
    """Rank-1 projectors onto the +/− eigenvectors of a Pauli axis."""
    plus, minus = AXIS_EIGENVECTORS[axis]
    return np.outer(plus, plus.conj()), np.outer(minus, minus.conj())


def bloch_observable(vector: np.ndarray) -> np.ndarray:
    """n·σ for a real 3-vector n (not normalized here)."""
    nx, ny, nz = (float(c) for c in vector)
    return nx * np.asarray(X) + ny * np.asarray(Y) + nz * np.asarray(Z)
