"""models package – immutable numerical domain types."""

from hetlink.models.channel import ProcessMatrix, QuantumChannel
from hetlink.models.state import DensityMatrix, Observable, PureState

__all__ = ["DensityMatrix", "Observable", "ProcessMatrix", "PureState", "QuantumChannel"]
