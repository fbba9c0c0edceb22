"""
scenarios/chsh_run.py – Bell test on the TI–QM link.

S is sampled from the propagated ti_qm state, dark noise included, so it
follows every link parameter. An explicit `chsh.visibility` replaces that
state with a Werner state for reproducing a fixed data set.
"""

import structlog

from hetlink.schemas.experiment import ExperimentConfig
from hetlink.schemas.report import RunReport, Statistic
from hetlink.scenarios.registry import scenario
from hetlink.services.chsh import chsh, fixed_chsh_settings, max_chsh, optimal_chsh_settings, simulate_chsh
from hetlink.services.pipeline import propagate
from hetlink.services.qstate import werner_state, werner_visibility
from hetlink.services.rng import child_rng

log = structlog.get_logger(__name__)

MEASURED_S = 2.328


@scenario("chsh")
def run_chsh(cfg: ExperimentConfig) -> RunReport:
    pipeline = propagate(cfg, "ti_qm")
    equivalent_p = werner_visibility(pipeline.fidelity)
    if cfg.chsh.visibility is None:
        source, visibility, rho = "pipeline", equivalent_p, pipeline.state
    else:
        source, visibility = "werner", cfg.chsh.visibility
        rho = werner_state(visibility)

    settings = optimal_chsh_settings(rho) if cfg.chsh.angle_mode == "optimal" else fixed_chsh_settings()
    s_exact = chsh(rho, settings)
    s_sampled, s_std = simulate_chsh(rho, settings, cfg.heralds_for("chsh"), child_rng(cfg.master_seed, 2))
    s_werner = max_chsh(werner_state(equivalent_p))
    log.info(
        "chsh_done",
        source=source,
        s=round(s_sampled, 4),
        stddev=round(s_std, 4),
        s_exact=round(s_exact, 4),
    )

    return RunReport(
        scenario="chsh",
        seed=cfg.master_seed,
        chsh=Statistic(value=s_sampled, stddev=s_std),
        analytic_fidelity=Statistic.exact_value(pipeline.fidelity),
        sweep=[
            {"source": source, "visibility": visibility, "S": s_exact},
            {"source": "pipeline_max", "visibility": None, "S": max_chsh(pipeline.state)},
            {"source": "werner_equivalent", "visibility": equivalent_p, "S": s_werner},
        ],
        notes=[
            f"angle mode {cfg.chsh.angle_mode}",
            f"sampled from {source} state",
            f"Werner-equivalent visibility {equivalent_p:.4f}, S {s_werner:.4f} "
            f"({s_werner - MEASURED_S:+.4f} vs measured {MEASURED_S})",
        ],
    )
