"""
services/memory_node.py – AFC memory: comb efficiency, spectral matching,
Stark-controlled readout and the heralded polarization-storage channel.

Pump-region planning lives in services/pump_planner.py.
"""

from __future__ import annotations

import math

import numpy as np
import structlog
from scipy.integrate import quad
from scipy.optimize import curve_fit

from hetlink.exceptions import ConvergenceError, ScheduleError
from hetlink.models.channel import QuantumChannel
from hetlink.schemas.memory import CombParams, SpectralModel, StarkControl
from hetlink.services.qstate import phase_flip_channel

log = structlog.get_logger(__name__)

# Gaussian-tooth shape factor √π / √(4 ln 2).
B_GAUSS = math.sqrt(math.pi) / math.sqrt(4 * math.log(2))
INTEGRATION_TOL = 1e-6
TAIL_SPAN = 10.0  # integrate numerically over ±10Γ, add the arctan tails


# ── Comb efficiency ───────────────────────────────────────────────────────────
def afc_efficiency(c: CombParams, t_storage_ns: float) -> float:
    """η = B²(d/F)²·exp(−B·d/F − 2πB²t²γ²) for Gaussian teeth."""
    if t_storage_ns < 0:
        raise ValueError(f"Storage time must be ≥ 0, got {t_storage_ns} ns")
    ratio = c.d / c.finesse
    t_gamma = t_storage_ns * 1e-9 * c.gamma_comb * 1e3
    eta = B_GAUSS**2 * ratio**2 * math.exp(-B_GAUSS * ratio - 2 * math.pi * B_GAUSS**2 * t_gamma**2)
    return min(max(eta, 0.0), 1.0)


def afc_log_curvature(c: CombParams) -> float:
    """Coefficient of t² (t in s) in log η: −2πB²γ²."""
    return -2 * math.pi * B_GAUSS**2 * (c.gamma_comb * 1e3) ** 2


def fit_comb_width(c: CombParams, times_ns: np.ndarray, efficiencies: np.ndarray) -> float:
    """Fit γ_comb (kHz) to measured efficiency-vs-storage-time points at fixed d/F."""

    def model(t_ns, gamma_khz):
        trial = c.model_copy(update={"gamma_comb": float(gamma_khz)})
        return np.array([afc_efficiency(trial, float(t)) for t in np.atleast_1d(t_ns)])

    try:
        popt, _ = curve_fit(
            model,
            np.asarray(times_ns, dtype=float),
            np.asarray(efficiencies, dtype=float),
            p0=[c.gamma_comb or 100.0],
            bounds=([0.0], [np.inf]),
        )
    except RuntimeError as exc:
        raise ConvergenceError(f"Comb-width fit failed: {exc}") from exc
    return float(popt[0])


# ── Spectral matching ─────────────────────────────────────────────────────────
def _half_width(m: SpectralModel) -> float:
    # gamma_natural is the FWHM; Lorentzian terms use the half width.
    return m.gamma_natural / 2


def _lorentzian(f, centre: float, w: float):
    return w**2 / ((np.asarray(f, dtype=float) - centre) ** 2 + w**2)


def spectral_density(f, m: SpectralModel):
    """Double Lorentzian with components at ±zeeman_split/2; peak 1 per component."""
    w = _half_width(m)
    s = m.zeeman_split / 2
    value = _lorentzian(f, s, w) + _lorentzian(f, -s, w)
    return float(value) if np.ndim(value) == 0 else value


def _arctan_integral(lo: float, hi: float, centre: float, w: float) -> float:
    return w * (math.atan((hi - centre) / w) - math.atan((lo - centre) / w))


def _window(m: SpectralModel) -> tuple[float, float]:
    half = m.qm_bandwidth / 2
    return -half + m.detuning_df, half + m.detuning_df


def bandwidth_match_closed_form(m: SpectralModel) -> float:
    """Arctan oracle for bandwidth_match."""
    if m.qm_bandwidth <= 0:
        raise ValueError("qm_bandwidth must be > 0")
    if math.isinf(m.qm_bandwidth):
        return 1.0
    w, s = _half_width(m), m.zeeman_split / 2
    lo, hi = _window(m)
    inside = _arctan_integral(lo, hi, s, w) + _arctan_integral(lo, hi, -s, w)
    return inside / (2 * math.pi * w)


def _integrate(fn, lo: float, hi: float, points: list[float]) -> float:
    inner = [p for p in points if lo < p < hi]
    value, err = quad(fn, lo, hi, points=inner or None, epsabs=1e-10, epsrel=1e-10, limit=200)
    if err > INTEGRATION_TOL:
        raise ConvergenceError(f"Spectral integral did not converge over [{lo}, {hi}]", gradient_norm=err)
    return value


def _full_line_integral(m: SpectralModel, centre: float) -> float:
    w = _half_width(m)
    span = TAIL_SPAN * m.gamma_natural
    core = _integrate(lambda f: _lorentzian(f, centre, w), -span, span, [centre])
    tails = w * math.pi - _arctan_integral(-span, span, centre, w)
    return core + tails


def _component_overlap(m: SpectralModel, centre: float) -> tuple[float, float]:
    """(power inside the memory band, total power) for one Lorentzian component."""
    total = _full_line_integral(m, centre)
    if math.isinf(m.qm_bandwidth):
        return total, total
    lo, hi = _window(m)
    inside = _integrate(lambda f: _lorentzian(f, centre, _half_width(m)), lo, hi, [centre])
    return inside, total


def bandwidth_match(m: SpectralModel) -> float:
    """Fraction of the photon spectrum falling inside the memory band."""
    if m.qm_bandwidth <= 0:
        raise ValueError("qm_bandwidth must be > 0")
    s = m.zeeman_split / 2
    in_plus, tot_plus = _component_overlap(m, s)
    in_minus, tot_minus = _component_overlap(m, -s)
    return (in_plus + in_minus) / (tot_plus + tot_minus)


def bandwidth_match_components(m: SpectralModel) -> dict[str, float]:
    """Overlap of each polarization component separately, and the total."""
    s = m.zeeman_split / 2
    in_plus, tot_plus = _component_overlap(m, s)
    in_minus, tot_minus = _component_overlap(m, -s)
    return {
        "sigma_plus": in_plus / tot_plus,
        "sigma_minus": in_minus / tot_minus,
        "total": (in_plus + in_minus) / (tot_plus + tot_minus),
    }


# ── Stark-modulated readout ───────────────────────────────────────────────────
def stark_splitting(e_field: float, rate: float) -> float:
    """Splitting (kHz) between the two sub-ensembles at field E (V/cm)."""
    if rate <= 0:
        raise ValueError(f"Stark rate must be > 0, got {rate}")
    return rate * e_field


def mean_stark_rate(rate_pos: float, rate_neg: float) -> float:
    return (abs(rate_pos) + abs(rate_neg)) / 2


def stark_rate(s: StarkControl) -> float:
    if s.shift_rate is not None:
        return s.shift_rate
    return mean_stark_rate(s.shift_rate_pos, s.shift_rate_neg)


def stark_field(s: StarkControl) -> float:
    """Field (V/cm) between electrodes separated by electrode_gap_um."""
    return s.pulse_voltage / (s.electrode_gap_um * 1e-4)


def stark_pulse_phase(s: StarkControl) -> float:
    """Relative phase (rad) the pulse imprints between the two sub-ensembles."""
    split_hz = stark_splitting(stark_field(s), stark_rate(s)) * 1e3
    return 2 * math.pi * split_hz * s.pulse_duration * 1e-9


def echo_suppression(s: StarkControl) -> float:
    """Residual echo amplitude factor cos²(φ/2); 0 means the echo is fully switched off."""
    return math.cos(stark_pulse_phase(s) / 2) ** 2


def smafc_readout_time(s: StarkControl) -> float:
    """Emission time (ns) of the echo released by the second, reversed pulse."""
    n, period = s.readout_order_n, s.echo_period
    first_end = s.first_pulse_start + s.pulse_duration
    if first_end > period:
        raise ScheduleError(
            f"First Stark pulse ends at {first_end} ns, after the first echo at {period} ns"
        )
    second = s.second_pulse_time
    if not (n - 1) * period < second <= n * period:
        raise ScheduleError(
            f"Second pulse at {second} ns is outside the order-{n} slot "
            f"({(n - 1) * period}, {n * period}] ns"
        )
    if second < first_end:
        raise ScheduleError(f"Second pulse at {second} ns overlaps the first pulse (ends {first_end} ns)")
    if not s.second_pulse_reversed:
        raise ScheduleError("Second Stark pulse must have reversed polarity to rephase the comb")
    return n * period


# ── Storage channels ──────────────────────────────────────────────────────────
def storage_channel(eta_h: float, eta_v: float) -> QuantumChannel:
    """Heralded polarization storage: photon amplitudes scaled by √η_H, √η_V."""
    for name, eta in (("eta_H", eta_h), ("eta_V", eta_v)):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {eta}")
    k = np.kron(np.eye(2), np.diag([math.sqrt(eta_h), math.sqrt(eta_v)]))
    return QuantumChannel((k,), trace_preserving=False, name="qm_storage")


def storage_residual_channel(infidelity: float) -> QuantumChannel:
    """Phenomenological photon dephasing with Bell-state infidelity equal to `infidelity`."""
    ch = phase_flip_channel(infidelity).on_subsystem(1)
    return QuantumChannel(ch.kraus_ops, name="qm_storage_residual")
