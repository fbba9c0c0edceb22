"""
scenarios/registry.py – Name → handler table and the `run` entry point.

Handlers register with the decorator, one module per scenario family:

    @scenario("budget")
    def run_budget(cfg: ExperimentConfig) -> RunReport: ...
"""

from __future__ import annotations

import time
from collections.abc import Callable

import structlog

from hetlink.exceptions import ConfigError
from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import RunReport

log = structlog.get_logger(__name__)

Handler = Callable[[ExperimentConfig], RunReport]
_HANDLERS: dict[str, Handler] = {}


def scenario(*names: str) -> Callable[[Handler], Handler]:
    def register(fn: Handler) -> Handler:
        for name in names:
            if name in _HANDLERS:
                raise RuntimeError(f"Scenario '{name}' registered twice")
            _HANDLERS[name] = fn
        return fn

    return register


def registered() -> tuple[str, ...]:
    return tuple(sorted(_HANDLERS))


def run(config: ExperimentConfig) -> RunReport:
    """Execute the configured scenario; identical config ⇒ identical report."""
    handler = _HANDLERS.get(config.scenario)
    if handler is None:
        raise ConfigError(f"No handler for scenario '{config.scenario}'")
    structlog.contextvars.bind_contextvars(scenario=config.scenario, seed=config.master_seed)
    start = time.perf_counter()
    try:
        log.info("scenario_started")
        report = handler(config)
        report.runtime_s = time.perf_counter() - start
        log.info("scenario_finished", runtime_s=round(report.runtime_s, 3))
        return report
    finally:
        structlog.contextvars.unbind_contextvars("scenario", "seed")
