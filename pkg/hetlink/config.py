"""
config.py – Process-level settings loaded from environment variables.

Pydantic-Settings reads from a .env file (or real env vars). Physical
parameters do NOT live here; they belong to the scenario config
(schemas/experiment.py) so that a run is fully described by one JSON file.
"""

import logging
from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # ── App ───────────────────────────────────────────────────────────────────
    APP_NAME: str = "hetlink"
    APP_ENV: str = Field("development", pattern="^(development|staging|production)$")
    DEBUG: bool = False

    # ── Logging ───────────────────────────────────────────────────────────────
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True  # False switches to the human-readable console renderer

    # ── Runs ──────────────────────────────────────────────────────────────────
    OUTPUT_DIR: Path = Path("runs")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept any stdlib level name, case-insensitively."""
        name = str(v).upper()
        if name not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level '{v}'")
        return name

    @property
    def log_level_number(self) -> int:
        return logging.getLevelNamesMapping()[self.LOG_LEVEL]


@lru_cache()  # singleton – created once per process
def get_settings() -> Settings:
    return Settings()
