"""
scenarios/sweeps.py – Memory design curves: comb efficiency vs storage time
(with the pump plan behind the comb depth) and bandwidth match vs detuning.
"""

import structlog

from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import RunReport
from hetlink.scenarios.registry import scenario
from hetlink.services.memory_node import (
    afc_efficiency,
    bandwidth_match,
    bandwidth_match_closed_form,
    echo_suppression,
    smafc_readout_time,
)
from hetlink.services.pump_planner import plan_from_config, pump_plan_rows

log = structlog.get_logger(__name__)


def grid(lo: float, hi: float, step: float) -> list[float]:
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 9) for i in range(n + 1) if lo + i * step <= hi + 1e-9]


@scenario("afc_sweep")
def run_afc_sweep(cfg: ExperimentConfig) -> RunReport:
    mem, sw = cfg.memory, cfg.sweep
    rows = [
        {
            "storage_us": t,
            "eta_H": afc_efficiency(mem.comb_h, t * 1e3),
            "eta_V": afc_efficiency(mem.comb_v, t * 1e3),
        }
        for t in grid(sw.storage_min_us, sw.storage_max_us, sw.storage_step_us)
    ]
    plan = plan_from_config(mem.pump)
    readout = smafc_readout_time(mem.stark)
    log.info("afc_sweep_done", points=len(rows), readout_ns=readout)
    return RunReport(
        scenario="afc_sweep",
        seed=cfg.master_seed,
        sweep=rows,
        pump_plan=pump_plan_rows(plan),
        notes=[
            *(f"effective d ({pol}) {d:.3f}" for pol, d in sorted(plan.effective_d.items())),
            f"SMAFC readout at {readout:g} ns",
            f"first-echo suppression {echo_suppression(mem.stark):.2e}",
        ],
    )


@scenario("bandwidth_sweep")
def run_bandwidth_sweep(cfg: ExperimentConfig) -> RunReport:
    base, sw = cfg.memory.spectral, cfg.sweep
    rows = []
    for df in grid(sw.detuning_min, sw.detuning_max, sw.detuning_step):
        model = base.model_copy(update={"detuning_df": df})
        rows.append(
            {"detuning_MHz": df, "eta_bw": bandwidth_match(model), "eta_bw_closed_form": bandwidth_match_closed_form(model)}
        )
    peak = bandwidth_match(base.model_copy(update={"detuning_df": 0.0}))
    log.info("bandwidth_sweep_done", points=len(rows), peak=round(peak, 4))
    return RunReport(
        scenario="bandwidth_sweep",
        seed=cfg.master_seed,
        sweep=rows,
        notes=[f"on-resonance bandwidth match {peak:.4f}"],
    )
