import asyncio
import logging

from core.errors import ConfigError
from sweeps.evolution_experiments import QuasimodeScan, SaturationSweep
from sweeps.identity_experiments import HardyCheck, IbpCheck
from sweeps.report import SweepReport
from sweeps.resolvent_experiments import QuadratureLemmas, ResolventSweep

logger = logging.getLogger("runner")

EXPERIMENTS = {
    experiment.kind: experiment
    for experiment in (ResolventSweep, QuadratureLemmas, QuasimodeScan, SaturationSweep, IbpCheck, HardyCheck)
}


async def run_sweep_async(sweep_config, jobs=1):
    """
    Execute the configured experiment and assemble its report

    Args:
        sweep_config (SweepConfig): Validated configuration
        jobs (int): Worker pool size

    Returns:
        SweepReport: Rows, fits and flags
    """
    experiment_class = EXPERIMENTS.get(sweep_config.experiment_kind)
    if experiment_class is None:
        raise ConfigError(f"No experiment registered for kind '{sweep_config.experiment_kind}'")
    experiment = experiment_class(sweep_config)
    rows = await experiment.run(jobs)
    report = SweepReport(sweep_config.as_dict(), rows)
    fits, flags = experiment.evaluate(report.rows)
    report.fits = fits
    report.flags = {name: bool(value) for name, value in flags.items()}
    failed = report.failed_flags()
    if failed:
        logger.warning(f"{sweep_config.experiment_kind}: failed flags {', '.join(failed)}")
    else:
        logger.info(f"{sweep_config.experiment_kind}: all {len(report.flags)} flags passed")
    return report


def run_sweep(sweep_config, jobs=1):
    """
    Blocking wrapper around run_sweep_async
    """
    return asyncio.run(run_sweep_async(sweep_config, jobs))
