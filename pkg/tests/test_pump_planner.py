"""
tests/test_pump_planner.py – Spectral pumping plan for the AFC band.

Covers:
  - pumped regions of every class IX transition against the published set
  - effective absorption depth for both polarizations
  - trivial plans (no windows, full-line window, everything pumped)
  - interval invariants and CSV export
"""

import pytest

from hetlink.exceptions import PumpPlanError
from hetlink.schemas.memory import CLASS_IX_TRANSITIONS, PumpConfig, PumpTransition
from hetlink.services.pump_planner import (
    PLAN_CSV_COLUMNS,
    effective_depth,
    measure,
    plan_from_config,
    plan_pump_regions,
    pump_plan_csv,
)

PUBLISHED_REGIONS = {
    "1/2g-1/2e": [(49.5, 272.7)],
    "1/2g-3/2e": [(0.0, 113.6)],
    "3/2g-1/2e": [(0.0, 75.1), (125.9, 349.1)],
    "3/2g-3/2e": [(0.0, 190.0)],
    "5/2g-1/2e": [(0.0, 223.2), (274.0, 497.2)],
    "5/2g-3/2e": [(0.0, 64.1), (114.9, 338.1)],
    "5/2g-5/2e": [(0.0, 65.4)],
}


def _plan(windows, transitions=CLASS_IX_TRANSITIONS, **kwargs):
    cfg = PumpConfig()
    return plan_pump_regions(transitions, windows, cfg.target(), line_span=cfg.line_span, **kwargs)


# ── Regression ────────────────────────────────────────────────────────────────
def test_default_windows_and_target():
    cfg = PumpConfig()
    assert cfg.pump_windows() == [(0.0, 223.2), (274.0, 497.2)]
    assert cfg.target() == (224.5, 272.7)


@pytest.mark.parametrize("label", sorted(PUBLISHED_REGIONS))
def test_published_pumped_regions(label):
    plan = plan_from_config(PumpConfig())
    got = plan.pumped_regions[label]
    want = PUBLISHED_REGIONS[label]
    assert len(got) == len(want)
    for (lo, hi), (wlo, whi) in zip(got, want):
        assert lo == pytest.approx(wlo, abs=0.1)
        assert hi == pytest.approx(whi, abs=0.1)


def test_effective_depth_both_polarizations():
    plan = plan_from_config(PumpConfig())
    assert plan.effective_d["H"] == pytest.approx(10.5, abs=0.5)
    assert plan.effective_d["V"] == pytest.approx(9.0, abs=0.5)


def test_partial_weight_moves_depth():
    low = plan_from_config(PumpConfig(partial_weight=0.34)).effective_d["H"]
    high = plan_from_config(PumpConfig(partial_weight=0.9)).effective_d["H"]
    assert low < high


# ── Trivial plans ─────────────────────────────────────────────────────────────
def test_no_windows_keeps_native_depth():
    plan = _plan([])
    assert all(not v for v in plan.pumped_regions.values())
    assert effective_depth(plan, 5.24) == pytest.approx(5.24)


def test_single_transition_fully_pumped():
    only = (PumpTransition(ground="1/2", excited="1/2", offset=0.0),)
    plan = plan_pump_regions(only, [(0.0, 497.2)], (600.0, 650.0), line_span=497.2)
    assert plan.pumped_regions["1/2g-1/2e"] == [(0.0, 497.2)]


def test_everything_pumped_leaves_no_depth():
    plan = _plan([(-1000.0, 2000.0)])
    assert plan.surviving == ()
    assert effective_depth(plan, 5.24) == 0.0


# ── Errors and invariants ─────────────────────────────────────────────────────
def test_window_over_target_rejected_in_strict_mode():
    with pytest.raises(PumpPlanError):
        _plan([(200.0, 260.0)], strict=True)


def test_window_over_target_tolerated_otherwise():
    plan = _plan([(200.0, 260.0)])
    assert plan.pumped_measure() > 0


def test_malformed_interval_rejected():
    with pytest.raises(PumpPlanError):
        _plan([(10.0, 5.0)])


def test_intervals_sorted_disjoint_and_inside_windows():
    windows = [(0.0, 120.0), (100.0, 223.2), (274.0, 497.2)]
    plan = _plan(windows)
    for t in CLASS_IX_TRANSITIONS:
        ivs = plan.pumped_regions[t.label]
        assert all(lo < hi for lo, hi in ivs)
        assert all(a[1] < b[0] for a, b in zip(ivs, ivs[1:]))
        for lo, hi in ivs:
            assert any(w0 - t.offset - 1e-9 <= lo and hi <= w1 - t.offset + 1e-9 for w0, w1 in [(0.0, 223.2), (274.0, 497.2)])


def test_measure_invariant_under_window_order():
    windows = [(0.0, 80.0), (274.0, 497.2), (60.0, 223.2)]
    forward = _plan(windows)
    backward = _plan(list(reversed(windows)))
    assert forward.pumped_measure() == pytest.approx(backward.pumped_measure())
    assert effective_depth(forward, 5.24) == pytest.approx(effective_depth(backward, 5.24))


# ── Export ────────────────────────────────────────────────────────────────────
def test_plan_csv():
    plan = plan_from_config(PumpConfig())
    lines = pump_plan_csv(plan).strip().split("\n")
    assert lines[0] == ",".join(PLAN_CSV_COLUMNS)
    pumped = [line for line in lines[1:] if line.endswith(",pumped")]
    assert len(pumped) == sum(len(v) for v in PUBLISHED_REGIONS.values())
    assert measure([(0.0, 1.0), (2.0, 4.0)]) == 3.0
