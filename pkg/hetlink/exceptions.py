"""
exceptions.py – Error hierarchy for the simulator.

Each top-level error carries the CLI exit code it maps to, the same way the
HTTP layer of a web service maps exceptions to status codes in one place.
Invariant violations on numerical types subclass ValueError so callers that
only care about "bad input" can catch the builtin.
"""

from __future__ import annotations


class HetlinkError(Exception):
    """Base class for errors surfaced by the CLI."""

    exit_code: int = 1


class ConfigError(HetlinkError):
    """Scenario configuration is missing fields or holds invalid values."""

    exit_code = 2

    def __init__(self, message: str, errors: list[str] | None = None) -> None:
        self.errors = errors or []
        if self.errors:
            message = message + "\n" + "\n".join(f"  - {e}" for e in self.errors)
        super().__init__(message)


class ConvergenceError(HetlinkError):
    """A numerical routine stopped before meeting its tolerance."""

    exit_code = 3

    def __init__(self, message: str, gradient_norm: float | None = None) -> None:
        self.gradient_norm = gradient_norm
        if gradient_norm is not None:
            message = f"{message} (final gradient norm {gradient_norm:.3e})"
        super().__init__(message)


class ReportError(HetlinkError):
    """Report files could not be written."""

    exit_code = 1


# ── Invariant violations ──────────────────────────────────────────────────────
class DimensionError(ValueError):
    """Operand dimensions do not match or exceed the two-qubit limit."""


class StateError(ValueError):
    """A matrix or vector is not a valid quantum state."""


class ChannelError(ValueError):
    """Kraus operators do not form a (trace non-increasing) CP map."""


class ScheduleError(ValueError):
    """Stark pulse schedule violates the echo timing constraints."""


class PumpPlanError(ValueError):
    """Pump windows or target band are malformed or inconsistent."""
