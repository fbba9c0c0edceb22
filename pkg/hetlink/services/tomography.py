"""
services/tomography.py – Two-qubit state tomography on the 3×3 Pauli grid.

Simulation:
    records = simulate_grid(rho, split_heralds(1780), snr=28, seed=7)
Reconstruction:
    rho_hat = mle_reconstruct(records)
    mean, std = bootstrap_uncertainty(records, 200, "fidelity", seed=7)
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog
from scipy.optimize import minimize

from hetlink.exceptions import ConvergenceError
from hetlink.models.operators import PAULIS, axis_projectors
from hetlink.models.state import DensityMatrix
from hetlink.schemas.tomography import (
    MUB_GRID,
    CountRecord,
    MeasurementSetting,
    TomographyConfig,
)
from hetlink.services.chsh import max_chsh
from hetlink.services.photon_chain import noise_fraction
from hetlink.services.qstate import bell_state, fidelity
from hetlink.services.rng import RngLike, as_generator, child_rng

log = structlog.get_logger(__name__)

PROB_FLOOR = 1e-15
INIT_MIX_THRESHOLD = 1e-6
INIT_MIX = 1e-3
RESIDUAL_TOL = 1e-3

# ±1 eigenvalue products per outcome (pp, pm, mp, mm).
_ION_SIGN = np.array([1, 1, -1, -1])
_PHOTON_SIGN = np.array([1, -1, 1, -1])


# ── Measurement model ─────────────────────────────────────────────────────────
def setting_projectors(setting: MeasurementSetting) -> np.ndarray:
    """(4, 4, 4) stack of outcome projectors in (pp, pm, mp, mm) order."""
    ion = axis_projectors(setting.ion_axis)
    photon = axis_projectors(setting.photon_axis)
    return np.stack([np.kron(a, b) for a in ion for b in photon])


def outcome_probabilities(rho: DensityMatrix, setting: MeasurementSetting, snr: float = math.inf) -> np.ndarray:
    """Born-rule probabilities on (1 − p)ρ + p·I/4 with p = 1/(snr + 1)."""
    p_noise = noise_fraction(snr)
    probs = np.einsum("kij,ji->k", setting_projectors(setting), rho.elements).real
    probs = (1 - p_noise) * probs + p_noise / 4
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def simulate_counts(
    rho: DensityMatrix, setting: MeasurementSetting, shots: int, snr: float, rng: RngLike
) -> CountRecord:
    if shots <= 0:
        raise ValueError(f"shots must be > 0, got {shots}")
    counts = as_generator(rng).multinomial(shots, outcome_probabilities(rho, setting, snr))
    return CountRecord(setting=setting, counts=tuple(float(c) for c in counts), shots=shots)


def expected_counts(rho: DensityMatrix, setting: MeasurementSetting, shots: int, snr: float = math.inf) -> CountRecord:
    """Fractional counts equal to shots × probability (no sampling noise)."""
    probs = outcome_probabilities(rho, setting, snr)
    return CountRecord(setting=setting, counts=tuple(float(shots * p) for p in probs), shots=shots)


def split_heralds(total: int, per_setting: dict[str, int] | None = None) -> dict[tuple[str, str], int]:
    """Shots per grid setting: explicit 'ZX'-style overrides, otherwise an even split."""
    if per_setting:
        shots = {(k[0], k[1]): int(v) for k, v in per_setting.items()}
        missing = [s.key for s in MUB_GRID if s.key not in shots]
        if missing:
            raise ValueError(f"per_setting_shots is missing settings {missing}")
        return shots
    if total < len(MUB_GRID):
        raise ValueError(f"Need at least {len(MUB_GRID)} heralds to cover the grid, got {total}")
    base, extra = divmod(total, len(MUB_GRID))
    return {s.key: base + (1 if i < extra else 0) for i, s in enumerate(MUB_GRID)}


def simulate_grid(
    rho: DensityMatrix, shots: dict[tuple[str, str], int], snr: float, seed: int
) -> list[CountRecord]:
    """One record per grid setting, each from its own child generator."""
    return [
        simulate_counts(rho, s, shots[s.key], snr, child_rng(seed, 0, i))
        for i, s in enumerate(MUB_GRID)
    ]


def exact_grid(rho: DensityMatrix, shots: int, snr: float = math.inf) -> list[CountRecord]:
    return [expected_counts(rho, s, shots, snr) for s in MUB_GRID]


# ── Estimators ────────────────────────────────────────────────────────────────
def _ordered(records: Sequence[CountRecord]) -> list[CountRecord]:
    by_key: dict[tuple[str, str], CountRecord] = {}
    for r in records:
        if r.shots <= 0:
            raise ValueError(f"Record {r.setting.key} has no shots")
        if r.setting.key in by_key:
            raise ValueError(f"Duplicate record for setting {r.setting.key}")
        by_key[r.setting.key] = r
    missing = [s.key for s in MUB_GRID if s.key not in by_key]
    if missing:
        raise ValueError(f"Tomography needs all {len(MUB_GRID)} settings; missing {missing}")
    return [by_key[s.key] for s in MUB_GRID]


def _stack(records: list[CountRecord]) -> tuple[np.ndarray, np.ndarray]:
    projs = np.concatenate([setting_projectors(r.setting) for r in records])
    counts = np.concatenate([np.asarray(r.counts, dtype=float) for r in records])
    return projs, counts


def _probabilities(projs: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.maximum(np.einsum("kij,ji->k", projs, rho).real, PROB_FLOOR)


def log_likelihood(rho: DensityMatrix, records: Sequence[CountRecord]) -> float:
    projs, counts = _stack(_ordered(records))
    return float(counts @ np.log(_probabilities(projs, rho.elements)))


def linear_inversion(records: Sequence[CountRecord]) -> DensityMatrix:
    """Pauli-expectation estimate, projected onto the physical states."""
    ordered = _ordered(records)
    expect: dict[tuple[str, str], list[float]] = {}
    for r in ordered:
        freq = np.asarray(r.counts) / sum(r.counts)
        a, b = r.setting.key
        expect.setdefault((a, b), []).append(float(freq @ (_ION_SIGN * _PHOTON_SIGN)))
        expect.setdefault((a, "I"), []).append(float(freq @ _ION_SIGN))
        expect.setdefault(("I", b), []).append(float(freq @ _PHOTON_SIGN))
    est = np.eye(4, dtype=complex) / 4
    for (a, b), values in expect.items():
        est += float(np.mean(values)) * np.kron(PAULIS[a], PAULIS[b]) / 4
    return DensityMatrix.project(est)


def _r_operator(projs: np.ndarray, counts: np.ndarray, rho: np.ndarray) -> np.ndarray:
    # Each setting's projectors sum to I, so R = I at the maximum.
    weights = counts / _probabilities(projs, rho) / counts.sum()
    return np.einsum("k,kij->ij", weights, projs)


def _fixed_point_residual(projs: np.ndarray, counts: np.ndarray, rho: np.ndarray) -> float:
    return float(np.linalg.norm(_r_operator(projs, counts, rho) @ rho - rho))


def _loglik(projs: np.ndarray, counts: np.ndarray, rho: np.ndarray) -> float:
    return float(counts @ np.log(_probabilities(projs, rho)))


def _cholesky_rho(params: np.ndarray) -> np.ndarray:
    """ρ = TT†/Tr(TT†) for lower-triangular T with real diagonal."""
    t = np.zeros((4, 4), dtype=complex)
    t[np.diag_indices(4)] = params[:4]
    low = np.tril_indices(4, -1)
    t[low] = params[4:10] + 1j * params[10:16]
    rho = t @ t.conj().T
    return rho / np.trace(rho).real


def _cholesky_params(rho: np.ndarray) -> np.ndarray:
    t = np.linalg.cholesky(rho + 1e-9 * np.eye(4))
    low = np.tril_indices(4, -1)
    return np.concatenate([t.diagonal().real, t[low].real, t[low].imag])


def _cholesky_ascent(projs: np.ndarray, counts: np.ndarray, rho0: np.ndarray, max_iter: int) -> np.ndarray:
    result = minimize(
        lambda x: -_loglik(projs, counts, _cholesky_rho(x)),
        _cholesky_params(rho0),
        method="L-BFGS-B",
        options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-10},
    )
    return _cholesky_rho(result.x)


def mle_reconstruct(records: Sequence[CountRecord], cfg: TomographyConfig | None = None) -> DensityMatrix:
    """
    Maximum-likelihood state from the nine grid records.

    Diluted RρR fixed-point iteration starting from the linear-inversion
    estimate; falls back to likelihood ascent over a Cholesky factor when the
    fixed point is not reached.
    """
    cfg = cfg or TomographyConfig()
    projs, counts = _stack(_ordered(records))

    rho = linear_inversion(records).elements.copy()
    observed = counts > 0
    if np.any(np.einsum("kij,ji->k", projs, rho).real[observed] < INIT_MIX_THRESHOLD):
        rho = (1 - INIT_MIX) * rho + INIT_MIX * np.eye(4) / 4

    eye = np.eye(4)
    current = _loglik(projs, counts, rho)
    dilution: float | None = None  # plain RρR until a step lowers the likelihood
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        r = _r_operator(projs, counts, rho)
        if dilution is not None:
            r = (eye + dilution * r) / (1 + dilution)
        trial = r @ rho @ r
        trial = trial / np.trace(trial).real
        trial = (trial + trial.conj().T) / 2
        value = _loglik(projs, counts, trial)
        if value < current:
            dilution = cfg.dilution if dilution is None else dilution / 2
            if dilution < 1e-12:
                break
            continue
        improvement = (value - current) / max(abs(current), 1e-300)
        rho, current = trial, value
        if improvement < cfg.tolerance:
            break

    residual = _fixed_point_residual(projs, counts, rho)
    if residual > RESIDUAL_TOL:
        log.info("mle_fallback_cholesky", residual=residual, iterations=iterations)
        rho = _cholesky_ascent(projs, counts, rho, cfg.max_iterations)
        residual = _fixed_point_residual(projs, counts, rho)
        if residual > RESIDUAL_TOL:
            raise ConvergenceError(
                f"MLE did not reach the likelihood maximum after {iterations} iterations",
                gradient_norm=residual,
            )

    log.debug("mle_converged", iterations=iterations, residual=residual, loglik=current)
    return DensityMatrix.project(rho)


# ── Bootstrap ─────────────────────────────────────────────────────────────────
Statistic = Callable[[DensityMatrix], float]

STATISTICS: dict[str, Statistic] = {
    "fidelity": lambda rho: fidelity(rho, bell_state()),
    "chsh": max_chsh,
}


def resample_records(records: Sequence[CountRecord], rng: RngLike) -> list[CountRecord]:
    gen = as_generator(rng)
    out = []
    for r in records:
        total = sum(r.counts)
        if r.shots <= 0 or total <= 0:
            raise ValueError(f"Cannot resample record {r.setting.key} with no counts")
        probs = np.asarray(r.counts, dtype=float) / total
        draw = gen.multinomial(r.shots, probs)
        out.append(CountRecord(setting=r.setting, counts=tuple(float(c) for c in draw), shots=r.shots))
    return out


def bootstrap_uncertainty(
    records: Sequence[CountRecord],
    n_resamples: int,
    statistic: str | Statistic,
    seed: int,
    *,
    cfg: TomographyConfig | None = None,
    workers: int = 1,
) -> tuple[float, float]:
    """(mean, sample stddev) of `statistic` over multinomial resamples of the records."""
    if n_resamples < 100:
        raise ValueError(f"n_resamples must be ≥ 100, got {n_resamples}")
    fn = STATISTICS[statistic] if isinstance(statistic, str) else statistic
    ordered = _ordered(records)

    def one(i: int) -> float:
        return fn(mle_reconstruct(resample_records(ordered, child_rng(seed, 1, i)), cfg))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(one, range(n_resamples))))
    else:
        values = np.array([one(i) for i in range(n_resamples)])
    return float(values.mean()), float(values.std(ddof=1))


# ── CSV ───────────────────────────────────────────────────────────────────────
COUNTS_CSV_COLUMNS = ("setting_ion", "setting_photon", "n_pp", "n_pm", "n_mp", "n_mm")


def counts_to_csv(records: Sequence[CountRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COUNTS_CSV_COLUMNS)
    for r in records:
        writer.writerow([r.setting.ion_axis, r.setting.photon_axis, *(f"{c:.15g}" for c in r.counts)])
    return buf.getvalue()


def counts_from_csv(text: str) -> list[CountRecord]:
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        counts = tuple(float(row[c]) for c in COUNTS_CSV_COLUMNS[2:])
        records.append(
            CountRecord(
                setting=MeasurementSetting(ion_axis=row["setting_ion"], photon_axis=row["setting_photon"]),
                counts=counts,
                shots=int(round(sum(counts))),
            )
        )
    return records
