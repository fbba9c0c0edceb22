"""
services/ion_node.py – Trapped-ion node: emission, excitation, readout, memory.

Covers
  - the ion–photon entangled state with its Zeeman phase,
  - pulsed-excitation probability and its fit,
  - threshold-based state readout (bright/dark) with calibrated noise,
  - Ramsey-characterized qubit dephasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog
from scipy.optimize import brentq, curve_fit
from scipy.stats import poisson

from hetlink.exceptions import ConvergenceError
from hetlink.models.channel import QuantumChannel
from hetlink.models.state import PureState
from hetlink.schemas.ion import ExcitationFit, IonParams, SpamParams
from hetlink.services.qstate import bell_state, dephasing_channel
from hetlink.services.rng import RngLike, as_generator

log = structlog.get_logger(__name__)

IonReadout = Literal["bright", "dark"]


# ── Emission ──────────────────────────────────────────────────────────────────
def compensation_phase(params: IonParams, t_elapsed_ns: float) -> float:
    """Phase ω·(t_c − t_0) that the analysis basis rotation removes."""
    return params.zeeman_omega * t_elapsed_ns * 1e-9


def emit_entangled_state(params: IonParams, t_elapsed_ns: float, phi_comp: float = 0.0) -> PureState:
    """(|1'⟩|σ+⟩ + e^{iφ}|1⟩|σ−⟩)/√2 with φ = ω·t − phi_comp."""
    if t_elapsed_ns < 0:
        raise ValueError(f"t_elapsed must be ≥ 0, got {t_elapsed_ns} ns")
    return bell_state(compensation_phase(params, t_elapsed_ns) - phi_comp)


# ── Excitation ────────────────────────────────────────────────────────────────
def bright_probability(fit: ExcitationFit) -> float:
    if fit.E < 0:
        raise ValueError(f"Pulse energy must be ≥ 0, got {fit.E}")
    angle = fit.alpha * fit.E ** (fit.beta / 2)
    return (2 * fit.A / 3) * math.sin(angle / 2) ** 2


def excitation_probability(fit: ExcitationFit) -> float:
    """P_e = P_bright / (2/3), clamped to [0, 1]."""
    return min(max(bright_probability(fit) / (2 / 3), 0.0), 1.0)


def _bright_model(energy: np.ndarray, A: float, alpha: float, beta: float) -> np.ndarray:
    return (2 * A / 3) * np.sin(alpha * np.power(energy, beta / 2) / 2) ** 2


def fit_excitation_curve(
    energies: np.ndarray, p_bright: np.ndarray, p0: tuple[float, float, float] = (0.9, math.pi, 1.0)
) -> ExcitationFit:
    """
    Fit (A, α, β) to bright-population data and return the fit evaluated at
    the π-pulse energy (α·E^{β/2} = π), i.e. the operating point.
    """
    try:
        popt, _ = curve_fit(
            _bright_model,
            np.asarray(energies, dtype=float),
            np.asarray(p_bright, dtype=float),
            p0=p0,
            bounds=([1e-6, 1e-6, 1e-6], [1.0, np.inf, np.inf]),
        )
    except RuntimeError as exc:
        raise ConvergenceError(f"Excitation curve fit failed: {exc}") from exc
    A, alpha, beta = (float(v) for v in popt)
    e_pi = (math.pi / alpha) ** (2 / beta)
    log.debug("excitation_fit", A=A, alpha=alpha, beta=beta, e_pi=e_pi)
    return ExcitationFit(A=A, alpha=alpha, beta=beta, E=e_pi)


# ── SPAM readout ──────────────────────────────────────────────────────────────
def _max_dark_count(threshold: float) -> int:
    return int(math.floor(threshold))


def calibrate_background_mean(dark_fidelity: float, threshold: float) -> float:
    """Poisson mean whose CDF at the threshold equals the dark-state fidelity."""
    k = _max_dark_count(threshold)
    if dark_fidelity >= 1.0:
        return 0.0
    hi = 10.0 * (k + 1) + 10.0
    return float(brentq(lambda mu: poisson.cdf(k, mu) - dark_fidelity, 0.0, hi, xtol=1e-14))


def _signal_pmf(mean: float, leak: float, kmax: int) -> np.ndarray:
    """P(min(n, L) = j), n ~ Poisson(mean), P(L = j) = leak·(1−leak)^j, for j ≤ kmax."""
    j = np.arange(kmax + 1)
    survive = (1 - leak) ** j
    return poisson.pmf(j, mean) * survive + poisson.sf(j, mean) * leak * survive


def bright_misread_probability(mean: float, leak: float, background: float, threshold: float) -> float:
    """P(counts ≤ threshold | bright)."""
    k = _max_dark_count(threshold)
    signal = _signal_pmf(mean, leak, k)
    bg_cdf = poisson.cdf(k - np.arange(k + 1), background)
    return float(np.dot(signal, bg_cdf))


def calibrate_spam(params: SpamParams) -> SpamParams:
    """Fill in background mean and leak probability from the readout fidelities."""
    background = params.background_mean
    if background is None:
        background = calibrate_background_mean(params.dark_fidelity, params.threshold)

    leak = params.leak_per_scatter
    if leak is None:
        target = 1.0 - params.bright_fidelity
        floor = bright_misread_probability(params.mean_bright_counts, 0.0, background, params.threshold)
        if floor > target:
            raise ValueError(
                f"Bright error {target:.4g} is below the Poisson floor {floor:.4g}; no leak rate fits"
            )
        leak = float(
            brentq(
                lambda q: bright_misread_probability(params.mean_bright_counts, q, background, params.threshold)
                - target,
                0.0,
                1.0,
                xtol=1e-14,
            )
        )
    log.debug("spam_calibrated", background_mean=background, leak_per_scatter=leak)
    return params.model_copy(update={"background_mean": background, "leak_per_scatter": leak})


def simulate_spam_batch(
    true_state: IonReadout, params: SpamParams, shots: int, rng: RngLike
) -> np.ndarray:
    """Photon counts for `shots` independent readouts of one prepared state."""
    if true_state not in ("bright", "dark"):
        raise ValueError(f"true_state must be 'bright' or 'dark', got {true_state!r}")
    p = calibrate_spam(params)
    gen = as_generator(rng)
    counts = gen.poisson(p.background_mean, size=shots)
    if true_state == "bright":
        scatter = gen.poisson(p.mean_bright_counts, size=shots)
        if p.leak_per_scatter > 0:
            # Photons detected before the ion leaks into the dark state.
            before_leak = gen.geometric(p.leak_per_scatter, size=shots) - 1
            scatter = np.minimum(scatter, before_leak)
        counts = counts + scatter
    return counts


def simulate_spam_readout(
    true_state: IonReadout, params: SpamParams, rng: RngLike
) -> tuple[int, IonReadout]:
    counts = int(simulate_spam_batch(true_state, params, 1, rng)[0])
    verdict: IonReadout = "bright" if counts > params.threshold else "dark"
    return counts, verdict


def readout_fidelity(counts: np.ndarray, true_state: IonReadout, threshold: float) -> float:
    """Fraction of shots whose threshold verdict matches the prepared state."""
    bright = np.asarray(counts) > threshold
    return float(np.mean(bright if true_state == "bright" else ~bright))


# ── Decoherence ───────────────────────────────────────────────────────────────
def coherence_factor(params: IonParams, t_us: float, exponent_a: float | None = None) -> float:
    a = params.decoherence_exponent if exponent_a is None else exponent_a
    if t_us < 0:
        raise ValueError(f"Storage time must be ≥ 0, got {t_us} µs")
    if not 1.0 <= a <= 3.0:
        raise ValueError(f"Decoherence exponent must be in [1, 3], got {a}")
    if math.isinf(t_us):
        return 0.0
    return math.exp(-((t_us * 1e-3 / params.coherence_time_tau) ** a))


def decoherence_channel(params: IonParams, t_us: float, exponent_a: float | None = None) -> QuantumChannel:
    """Ion-qubit dephasing after `t_us` of storage, as a two-qubit channel."""
    c = coherence_factor(params, t_us, exponent_a)
    ch = dephasing_channel(c).on_subsystem(0)
    return QuantumChannel(ch.kraus_ops, name="ion_decoherence")


# ── Ramsey characterization ───────────────────────────────────────────────────
def ramsey_curve(t, C: float, D: float, omega_R: float, phi_R0: float, tau_co: float):
    """C + D·exp(−(t/τ)²)·cos(2π·ω_R·t + φ_R0); t and τ share units, ω_R in 1/unit."""
    if tau_co <= 0:
        raise ValueError(f"tau_co must be > 0, got {tau_co}")
    t = np.asarray(t, dtype=float)
    return C + D * np.exp(-((t / tau_co) ** 2)) * np.cos(2 * np.pi * omega_R * t + phi_R0)


@dataclass(frozen=True)
class RamseyFit:
    tau_co: float
    tau_err: float
    C: float
    D: float
    omega_R: float
    phi_R0: float


def fit_ramsey(
    t: np.ndarray,
    p: np.ndarray,
    p0: tuple[float, float, float, float, float],
    sigma: np.ndarray | None = None,
) -> RamseyFit:
    """Least-squares Ramsey fit; p0 = (C, D, ω_R, φ_R0, τ_co)."""
    try:
        popt, pcov = curve_fit(
            ramsey_curve,
            np.asarray(t, dtype=float),
            np.asarray(p, dtype=float),
            p0=p0,
            sigma=sigma,
            absolute_sigma=sigma is not None,
            bounds=([-np.inf, -np.inf, 0.0, -np.inf, 1e-12], np.inf),
        )
    except RuntimeError as exc:
        raise ConvergenceError(f"Ramsey fit failed: {exc}") from exc
    C, D, omega_R, phi_R0, tau = (float(v) for v in popt)
    return RamseyFit(
        tau_co=tau,
        tau_err=float(np.sqrt(pcov[4, 4])),
        C=C,
        D=D,
        omega_R=omega_R,
        phi_R0=phi_R0,
    )
