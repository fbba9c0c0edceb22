"""
scenarios/budget_run.py – Rate table and infidelity ledger (no sampling).
"""

import structlog

from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import RunReport, Statistic
from hetlink.scenarios.registry import scenario
from hetlink.services.budget import build_error_ledger, ledger_total, rate_rows
from hetlink.services.pipeline import isolated_infidelities, propagate

log = structlog.get_logger(__name__)


@scenario("budget")
def run_budget(cfg: ExperimentConfig) -> RunReport:
    ledger = build_error_ledger(isolated_infidelities(cfg, "ti_qm"))
    total = ledger_total(ledger, cfg.budget)
    pipeline = propagate(cfg, "ti_qm")
    log.info("budget_done", total=round(total, 5), source=cfg.budget.ledger_source, mode=cfg.budget.mode)

    return RunReport(
        scenario="budget",
        seed=cfg.master_seed,
        analytic_fidelity=Statistic.exact_value(pipeline.fidelity),
        herald_probability=Statistic.exact_value(pipeline.herald_probability),
        rates=rate_rows(cfg.budget, cfg.ion, cfg.excitation),
        budget=ledger,
        budget_total=Statistic.exact_value(total),
        channel_breakdown=list(pipeline.breakdown),
        notes=[
            f"ledger total from the {cfg.budget.ledger_source} column, {cfg.budget.mode} mode",
            "modelled dark noise uses p = 1/(SNR+1); the published row corresponds to 1/SNR",
        ],
    )
