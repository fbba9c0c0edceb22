"""
services/reports.py – Deterministic report serialization and file output.

Filenames embed scenario and seed:
    <out>/<scenario>_seed<seed>_summary.json
    <out>/<scenario>_seed<seed>_matrix.json      (when a matrix is present)
    <out>/<scenario>_seed<seed>_<table>.csv      (budget, rates, counts, ...)

Identical reports serialize to identical bytes: keys are sorted, floats are
rounded to 15 significant digits and non-finite floats become null.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Literal

import structlog

from hetlink.exceptions import ReportError
from hetlink.schemas.report import RunReport
from hetlink.services.tomography import counts_to_csv

log = structlog.get_logger(__name__)

ReportFormat = Literal["json", "csv", "both"]


def _clean(value: Any) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.15g}") + 0.0
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def to_json(payload: Any) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def report_to_json(report: RunReport) -> str:
    return to_json(report.model_dump(mode="python"))


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    columns = list(rows[0].keys())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in _clean(row).items()})
    return buf.getvalue()


def _tables(report: RunReport) -> dict[str, str]:
    tables: dict[str, str] = {}
    if report.budget:
        tables["budget"] = rows_to_csv([r.model_dump() for r in report.budget])
    if report.rates:
        tables["rates"] = rows_to_csv([r.model_dump() for r in report.rates])
    if report.channel_breakdown:
        tables["breakdown"] = rows_to_csv([r.model_dump() for r in report.channel_breakdown])
    if report.counts:
        tables["counts"] = counts_to_csv(report.counts)
    if report.sweep:
        tables["sweep"] = rows_to_csv(report.sweep)
    if report.pump_plan:
        tables["pump_plan"] = rows_to_csv(report.pump_plan)
    return tables


class ReportWriter:
    """Writes the files of one RunReport into an output directory."""

    def __init__(self, output_dir: Path) -> None:
        self.output_dir = Path(output_dir)

    def _path(self, report: RunReport, suffix: str) -> Path:
        return self.output_dir / f"{report.scenario}_seed{report.seed}_{suffix}"

    def _write(self, path: Path, text: str) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            raise ReportError(f"Cannot write report file {path}: {exc}") from exc
        return path

    def emit(self, report: RunReport, fmt: ReportFormat = "json") -> list[Path]:
        if fmt not in ("json", "csv", "both"):
            raise ReportError(f"Unknown report format '{fmt}'")
        written: list[Path] = []
        if fmt in ("json", "both"):
            written.append(self._write(self._path(report, "summary.json"), report_to_json(report)))
            if report.matrix is not None:
                written.append(self._write(self._path(report, "matrix.json"), to_json(report.matrix)))
        if fmt in ("csv", "both"):
            for name, text in _tables(report).items():
                written.append(self._write(self._path(report, f"{name}.csv"), text))
        log.info("report_written", files=[str(p) for p in written], format=fmt)
        return written


def emit_report(report: RunReport, fmt: ReportFormat, output_dir: Path) -> list[Path]:
    return ReportWriter(output_dir).emit(report, fmt)
