"""
schemas/base.py – Shared pydantic base for config sections.
"""

from pydantic import BaseModel, ConfigDict


class Section(BaseModel):
    """Immutable config section; unknown keys are validation errors."""

    model_config = ConfigDict(frozen=True, extra="forbid")
