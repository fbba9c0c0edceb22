"""scenarios package – importing it registers every scenario handler."""

from hetlink.scenarios import budget_run, chsh_run, sweeps, tomography_runs  # noqa: F401
from hetlink.scenarios.registry import registered, run

__all__ = ["registered", "run"]
