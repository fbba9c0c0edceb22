"""
main.py – Command-line entry point.

    python -m hetlink run --scenario ti_qm --seed 7 --format both
    python -m hetlink defaults > defaults.json

Patterns used:
  - Structured logging with structlog, configured once from Settings
  - Scenario config validated by pydantic; every failing field is listed
  - HetlinkError subclasses map to process exit codes
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import structlog
from pydantic import ValidationError

from hetlink import __version__
from hetlink.config import Settings, get_settings
from hetlink.exceptions import ConfigError, HetlinkError
from hetlink.schemas.experiment import SCENARIOS, ExperimentConfig
from hetlink.services.reports import emit_report, to_json

log = structlog.get_logger(__name__)

HERALDED_SCENARIOS = ("ion_photon", "post_qfc", "ti_qm", "chsh")


# ── Logging ───────────────────────────────────────────────────────────────────
def configure_logging(settings: Settings) -> None:
    renderer = (
        structlog.processors.JSONRenderer()
        if settings.LOG_JSON
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(settings.log_level_number),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


# ── Config loading ────────────────────────────────────────────────────────────
def _format_errors(exc: ValidationError) -> list[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()]


def load_config(path: Path | None = None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read a JSON scenario document (or the defaults) and apply flag overrides."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")

    for key, value in (overrides or {}).items():
        if key == "heralds":
            data["heralds"] = {**data.get("heralds", ExperimentConfig().heralds), **value}
        else:
            data[key] = value

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        errors = _format_errors(exc)
        raise ConfigError(f"Invalid scenario config ({len(errors)} errors)", errors) from exc


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if args.scenario is not None:
        out["scenario"] = args.scenario
    if args.seed is not None:
        out["master_seed"] = args.seed
    if args.out is not None:
        out["output_dir"] = str(args.out)
    if args.shots is not None:
        scenario = args.scenario
        if scenario is None:
            raise ConfigError("--shots needs --scenario")
        if scenario not in HERALDED_SCENARIOS:
            raise ConfigError(f"--shots does not apply to scenario '{scenario}'")
        out["heralds"] = {scenario: args.shots}
    return out


# ── CLI ───────────────────────────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetlink", description="Ion–memory network link simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario and write its report")
    run.add_argument("--scenario", choices=SCENARIOS)
    run.add_argument("--config", type=Path, help="JSON scenario document")
    run.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    run.add_argument("--shots", type=int, help="Heralded trials for the scenario")
    run.add_argument("--out", type=Path, help="Output directory")
    run.add_argument("--format", choices=("json", "csv", "both"), default="json")

    sub.add_parser("defaults", help="Print the default scenario document")
    return parser


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    from hetlink.scenarios import run

    cfg = load_config(args.config, _overrides(args))
    explicit_out = args.out is not None or "output_dir" in cfg.model_fields_set
    out_dir = cfg.output_dir if explicit_out else settings.OUTPUT_DIR
    report = run(cfg)
    for path in emit_report(report, args.format, out_dir):
        print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    settings = get_settings()
    configure_logging(settings)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "defaults":
            sys.stdout.write(to_json(ExperimentConfig().model_dump(mode="json")))
            return 0
        return _cmd_run(args, settings)
    except HetlinkError as exc:
        log.error("run_failed", error=str(exc), exit_code=exc.exit_code)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        # Parameter invariants (schedules, pump windows) are configuration faults.
        log.error("run_failed", error=str(exc), exit_code=ConfigError.exit_code)
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
