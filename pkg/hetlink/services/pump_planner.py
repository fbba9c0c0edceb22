"""
services/pump_planner.py – Spectral-hole pumping plan for the AFC crystal.

Each ion in the inhomogeneous line is labelled by x ∈ [0, line_span], the
detuning of its |5/2⟩g→|1/2⟩e transition.  A transition with offset δ sits at
x + δ, so a pump window [a, b] empties that transition for x ∈ [a − δ, b − δ].
Ions whose absorbing transition is left inside the target band gain the
population pumped out of the other ground states.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field, replace

import structlog

from hetlink.exceptions import PumpPlanError
from hetlink.schemas.memory import PumpConfig, PumpTransition

log = structlog.get_logger(__name__)

Interval = tuple[float, float]

NATIVE_WEIGHT = 1.0 / 3.0
_EPS = 1e-9


# ── Interval helpers ──────────────────────────────────────────────────────────
def _intersect(a: Interval, b: Interval) -> Interval | None:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if hi - lo > _EPS else None


def merge_intervals(intervals: list[Interval]) -> list[Interval]:
    """Sorted, disjoint union of the given intervals."""
    merged: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + _EPS:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(round(lo, 9), round(hi, 9)) for lo, hi in merged]


def _covers(intervals: list[Interval], x: float) -> bool:
    return any(lo - _EPS <= x <= hi + _EPS for lo, hi in intervals)


def measure(intervals: list[Interval]) -> float:
    return sum(hi - lo for lo, hi in intervals)


# ── Plan ──────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class SurvivingSegment:
    transition: str
    lo: float
    hi: float
    weight: float


@dataclass(frozen=True)
class PumpPlan:
    transitions: tuple[PumpTransition, ...]
    pump_windows: tuple[Interval, ...]
    target: Interval
    line_span: float
    pumped_regions: dict[str, list[Interval]]
    surviving: tuple[SurvivingSegment, ...]
    effective_d: dict[str, float] = field(default_factory=dict)

    def pumped_measure(self) -> float:
        return sum(measure(v) for v in self.pumped_regions.values())


def _ground_status(
    transitions: tuple[PumpTransition, ...], pumped: dict[str, list[Interval]], x: float
) -> dict[str, str]:
    by_ground: dict[str, list[bool]] = defaultdict(list)
    for t in transitions:
        by_ground[t.ground].append(_covers(pumped[t.label], x))
    status = {}
    for ground, flags in by_ground.items():
        status[ground] = "full" if all(flags) else "partial" if any(flags) else "none"
    return status


def _target_span(t: PumpTransition, target: Interval, line_span: float) -> Interval | None:
    return _intersect((target[0] - t.offset, target[1] - t.offset), (0.0, line_span))


def plan_pump_regions(
    transitions: tuple[PumpTransition, ...],
    windows: list[Interval],
    target: Interval,
    *,
    line_span: float,
    partial_weight: float = 0.5,
    strict: bool = False,
) -> PumpPlan:
    """Pumped regions per transition and the weighted absorbers left in the target band."""
    for lo, hi in [*windows, target]:
        if not lo < hi:
            raise PumpPlanError(f"Interval [{lo}, {hi}] must have lo < hi")
    for w in windows:
        if _intersect(w, target):
            msg = f"Pump window [{w[0]}, {w[1]}] overlaps the target band [{target[0]}, {target[1]}]"
            if strict:
                raise PumpPlanError(msg)
            log.warning("pump_window_overlaps_target", window=w, target=target)

    pumped: dict[str, list[Interval]] = {}
    for t in transitions:
        shifted = (_intersect((lo - t.offset, hi - t.offset), (0.0, line_span)) for lo, hi in windows)
        pumped[t.label] = merge_intervals([iv for iv in shifted if iv])

    # Elementary segments: between any two pumped/target boundaries the
    # ground-state status is constant.
    cuts = {0.0, line_span}
    for ivs in pumped.values():
        for lo, hi in ivs:
            cuts.update((lo, hi))
    for t in transitions:
        span = _target_span(t, target, line_span)
        if span:
            cuts.update(span)
    edges = sorted(cuts)

    surviving: list[SurvivingSegment] = []
    for t in transitions:
        span = _target_span(t, target, line_span)
        if span is None:
            continue
        for lo, hi in zip(edges, edges[1:]):
            seg = _intersect((lo, hi), span)
            if seg is None:
                continue
            mid = (seg[0] + seg[1]) / 2
            if _covers(pumped[t.label], mid):
                continue
            status = _ground_status(transitions, pumped, mid)
            others = [s for g, s in status.items() if g != t.ground]
            if others and all(s == "full" for s in others):
                weight = 1.0
            elif any(s != "none" for s in others):
                weight = partial_weight
            else:
                weight = NATIVE_WEIGHT
            surviving.append(SurvivingSegment(t.label, round(seg[0], 9), round(seg[1], 9), weight))

    plan = PumpPlan(
        transitions=tuple(transitions),
        pump_windows=tuple(tuple(w) for w in windows),
        target=tuple(target),
        line_span=line_span,
        pumped_regions=pumped,
        surviving=tuple(surviving),
    )
    log.debug("pump_plan_built", windows=len(windows), surviving=len(surviving))
    return plan


def effective_depth(plan: PumpPlan, native_d: float) -> float:
    """Scale native_d by the weighted surviving absorption relative to an unpumped crystal."""
    reference = 0.0
    for t in plan.transitions:
        span = _target_span(t, plan.target, plan.line_span)
        if span:
            reference += NATIVE_WEIGHT * (span[1] - span[0])
    if reference == 0.0:
        return 0.0
    enhanced = sum(s.weight * (s.hi - s.lo) for s in plan.surviving)
    return native_d * enhanced / reference


def plan_from_config(cfg: PumpConfig, *, strict: bool = False) -> PumpPlan:
    plan = plan_pump_regions(
        cfg.transitions,
        cfg.pump_windows(),
        cfg.target(),
        line_span=cfg.line_span,
        partial_weight=cfg.partial_weight,
        strict=strict,
    )
    depths = {pol: effective_depth(plan, d) for pol, d in cfg.native_depth.items()}
    log.info("pump_plan", **{f"d_{pol}": round(v, 3) for pol, v in depths.items()})
    return replace(plan, effective_d=depths)


# ── Export ────────────────────────────────────────────────────────────────────
PLAN_CSV_COLUMNS = ("transition", "lo_MHz", "hi_MHz", "fraction", "kind")


def pump_plan_rows(plan: PumpPlan) -> list[dict]:
    """Pumped rows carry fraction 0 (nothing left to absorb); surviving rows carry their weight."""
    rows = []
    for t in plan.transitions:
        for lo, hi in plan.pumped_regions[t.label]:
            rows.append({"transition": t.label, "lo_MHz": lo, "hi_MHz": hi, "fraction": 0.0, "kind": "pumped"})
    for s in plan.surviving:
        rows.append({"transition": s.transition, "lo_MHz": s.lo, "hi_MHz": s.hi, "fraction": s.weight, "kind": "surviving"})
    return rows


def pump_plan_csv(plan: PumpPlan) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=PLAN_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(pump_plan_rows(plan))
    return buf.getvalue()
