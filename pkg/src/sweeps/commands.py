import logging

from core.command_registry import command_registry
from core.errors import ConfigError
from sweeps.report import emit_report, load_report
from sweeps.runner import run_sweep_async
from sweeps.sweep_config import SweepConfig

logger = logging.getLogger("sweep_commands")


def load_sweep_config(args, experiment_kind):
    """
    Build the SweepConfig for a sweep subcommand

    Args:
        args (argparse.Namespace): Parsed flags
        experiment_kind (str): Kind the subcommand runs

    Returns:
        SweepConfig: Configuration with --seed applied
    """
    if args.config:
        sweep_config = SweepConfig.from_file(args.config)
        if sweep_config.experiment_kind != experiment_kind:
            raise ConfigError(f"{args.config} configures '{sweep_config.experiment_kind}', "
                              f"but this subcommand runs '{experiment_kind}'")
    else:
        sweep_config = SweepConfig({"experiment_kind": experiment_kind})
    if args.seed is not None:
        sweep_config.seed = int(args.seed)
    if args.out:
        sweep_config.output_paths["dir"] = args.out
    return sweep_config


async def run_and_emit(args, experiment_kind):
    sweep_config = load_sweep_config(args, experiment_kind)
    report = await run_sweep_async(sweep_config, args.jobs)
    path = emit_report(report, args.format, sweep_config.output_paths["dir"],
                       sweep_config.output_paths["basename"])
    logger.info(f"{experiment_kind} report at {path}: {'passed' if report.passed else 'FAILED'}")
    return 0 if report.passed else 1


@command_registry.register("resolvent-sweep", experiment_kind="resolvent")
async def resolvent_sweep(args):
    """
    Resolvent estimate ratios in the four frequency regimes
    """
    return await run_and_emit(args, "resolvent")


@command_registry.register("quasimode-scan", experiment_kind="quasimode")
async def quasimode_scan(args):
    """
    Quasimode residual scaling and growth-factor bound
    """
    return await run_and_emit(args, "quasimode")


@command_registry.register("saturation", experiment_kind="saturation")
async def saturation(args):
    """
    Saturation of the lossy local energy estimate by quasimode data
    """
    return await run_and_emit(args, "saturation")


@command_registry.register("ibp-check", experiment_kind="ibp-check")
async def ibp_check(args):
    """
    Multiplier identity refinement study and interior coercivity signs
    """
    return await run_and_emit(args, "ibp-check")


@command_registry.register("hardy-check", experiment_kind="hardy-check")
async def hardy_check(args):
    """
    Seeded random search for the Hardy constant
    """
    return await run_and_emit(args, "hardy-check")


@command_registry.register("quad-lemmas", experiment_kind="quadrature-lemmas")
async def quad_lemmas(args):
    """
    Normalized degenerate-well quadratures across lambda
    """
    return await run_and_emit(args, "quadrature-lemmas")


@command_registry.register("report")
async def report(args):
    """
    Re-emit a saved JSON report

    --config names the JSON report to read; the exit code reflects its flags.
    """
    if not args.config:
        raise ConfigError("report needs --config <saved report.json>")
    saved = load_report(args.config)
    out_dir = args.out or saved.config.get("output_paths", {}).get("dir", ".")
    basename = saved.config.get("output_paths", {}).get("basename", "report")
    emit_report(saved, args.format, out_dir, basename)
    failed = saved.failed_flags()
    if failed:
        logger.warning(f"Saved report has failed flags: {', '.join(failed)}")
    return 0 if saved.passed else 1
