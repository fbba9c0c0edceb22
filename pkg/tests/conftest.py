"""
tests/conftest.py – Shared pytest fixtures for the test suite.

Architecture:
  - Everything runs in-process on the default scenario document.
  - Randomized checks draw from seeded generators so failures reproduce.
  - Factory helpers build count records, configs and random physical states.
"""

from typing import Any

import numpy as np
import pytest

from hetlink.config import get_settings
from hetlink.models.state import DensityMatrix
from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.tomography import CountRecord
from hetlink.services.qstate import bell_state as _bell_state
from hetlink.services.tomography import exact_grid, simulate_grid, split_heralds


# ── Settings cache ────────────────────────────────────────────────────────────
@pytest.fixture(autouse=True)
def _fresh_settings():
    """Each test sees settings built from its own environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# ── States ────────────────────────────────────────────────────────────────────
@pytest.fixture
def bell_state() -> DensityMatrix:
    return DensityMatrix.from_pure(_bell_state())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_state(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed density matrix (full rank unless `rank` is given)."""
    cols = rank or dim
    g = rng.normal(size=(dim, cols)) + 1j * rng.normal(size=(dim, cols))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ── Config ────────────────────────────────────────────────────────────────────
@pytest.fixture
def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def make_config(**overrides: Any) -> ExperimentConfig:
    """Default document with top-level fields (or whole sections) replaced."""
    return ExperimentConfig.model_validate({**ExperimentConfig().model_dump(), **overrides})


# ── Count records ─────────────────────────────────────────────────────────────
def make_records(
    rho: DensityMatrix,
    shots: int = 1_000_000,
    *,
    exact: bool = True,
    snr: float = float("inf"),
    seed: int = 7,
) -> list[CountRecord]:
    """Nine grid records: exact fractional counts, or multinomial samples per setting."""
    if exact:
        return exact_grid(rho, shots, snr)
    return simulate_grid(rho, split_heralds(shots * 9), snr, seed)
