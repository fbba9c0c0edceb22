"""
scripts/export_defaults.py – Write the shipped default scenario document.

Usage:
    python scripts/export_defaults.py [path]      (default: defaults.json)

Every field holds its published value; edit a copy and pass it to
`python -m hetlink run --config <file>`.
"""

import sys
from pathlib import Path

# Allow importing hetlink from the project root
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from dotenv import load_dotenv
load_dotenv()

import structlog

from hetlink.config import get_settings
from hetlink.main import configure_logging, load_config
from hetlink.schemas.experiment import ExperimentConfig
from hetlink.services.reports import to_json

log = structlog.get_logger(__name__)


def export(path: Path) -> None:
    text = to_json(ExperimentConfig().model_dump(mode="json"))
    path.write_text(text, encoding="utf-8")
    # The exported document must load back to the same config.
    load_config(path)
    log.info("defaults_exported", path=str(path), bytes=len(text))


if __name__ == "__main__":
    configure_logging(get_settings())
    export(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("defaults.json"))
