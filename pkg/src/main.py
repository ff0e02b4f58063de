import asyncio
import os
import logging
import argparse
import sys

from core.config import config

# Set up logging
logging.basicConfig(
    level=getattr(logging, config.log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger("main")


def add_common_arguments(parser):
    """
    Flags shared by every subcommand
    """
    parser.add_argument('--config', '-c', type=str, default=None,
                        help="SweepConfig JSON document (for 'report': the saved JSON report)")
    parser.add_argument('--out', '-o', type=str, default=None,
                        help=f"Output directory (default {config.output_dir})")
    parser.add_argument('--format', '-f', choices=('csv', 'json'), default='json',
                        help="Report format")
    parser.add_argument('--jobs', '-j', type=int, default=config.jobs,
                        help="Number of sweep points measured concurrently")
    parser.add_argument('--seed', type=int, default=None,
                        help="Seed for randomized experiments, overrides the config document")


def build_parser():
    from core.command_registry import command_registry
    import sweeps.commands  # noqa: F401  registers the subcommands

    parser = argparse.ArgumentParser(
        prog=os.path.basename(sys.argv[0]) if sys.argv and sys.argv[0] else "main.py",
        description="Numerical lab for degenerate trapping on warped products",
        epilog=command_registry.get_help_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    command_registry.add_subparsers(parser, add_common_arguments)
    return parser


async def main(argv=None):
    """
    Application main entry point

    Returns:
        int: 0 iff every pass/fail flag of the report passed
    """
    from core.command_registry import command_registry
    from core.errors import LabError

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        logger.error(f"--jobs must be at least 1, got {args.jobs}")
        return 1

    handler = command_registry.get_command(args.command)['handler']
    try:
        return await handler(args)
    except LabError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    try:
        exit_code = asyncio.run(main())
        sys.exit(exit_code)
    except KeyboardInterrupt:
        print("\nInterrupted")
        sys.exit(1)
    except Exception as e:
        logger.critical(f"Unhandled exception: {e}")
        import traceback
        logger.critical(traceback.format_exc())
        sys.exit(1)
