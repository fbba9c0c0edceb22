"""
scenarios/tomography_runs.py – State tomography at the three link stages.

The physical pipeline state is sampled on the 3×3 grid with the stage's
detection noise, reconstructed by MLE and bootstrapped for its error bar.
"""

import structlog

from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import RunReport, Statistic
from hetlink.scenarios.registry import scenario
from hetlink.services.budget import build_error_ledger
from hetlink.services.pipeline import isolated_infidelities, propagate
from hetlink.services.qstate import bell_state, fidelity
from hetlink.services.tomography import (
    bootstrap_uncertainty,
    mle_reconstruct,
    simulate_grid,
    split_heralds,
)

log = structlog.get_logger(__name__)


@scenario("ion_photon", "post_qfc", "ti_qm")
def run_tomography(cfg: ExperimentConfig) -> RunReport:
    stage = cfg.scenario
    result = propagate(cfg, stage)
    shots = split_heralds(cfg.heralds_for(stage), cfg.tomography.per_setting_shots)
    records = simulate_grid(result.physical_state, shots, result.snr, cfg.master_seed)

    rho_hat = mle_reconstruct(records, cfg.tomography)
    f_hat = fidelity(rho_hat, bell_state())
    _, f_std = bootstrap_uncertainty(
        records, cfg.tomography.bootstrap_resamples, "fidelity", cfg.master_seed, cfg=cfg.tomography
    )
    log.info("tomography_done", fidelity=round(f_hat, 4), stddev=round(f_std, 4), heralds=sum(shots.values()))

    ledger = None
    if stage == "ti_qm":
        ledger = build_error_ledger(isolated_infidelities(cfg, stage))

    return RunReport(
        scenario=stage,
        seed=cfg.master_seed,
        fidelity=Statistic(value=f_hat, stddev=f_std),
        analytic_fidelity=Statistic.exact_value(result.fidelity),
        herald_probability=Statistic.exact_value(result.herald_probability),
        matrix=rho_hat.to_json_dict(),
        budget=ledger,
        channel_breakdown=list(result.breakdown),
        counts=records,
        notes=[f"detection SNR {result.snr:g}", f"heralds per setting split over {len(shots)} settings"],
    )
