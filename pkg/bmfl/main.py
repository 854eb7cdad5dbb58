"""
Command-line entry point.
"""
import argparse
import hashlib
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from bmfl.commands import COMMANDS
from bmfl.config import settings
from bmfl.core.exceptions import EXIT_VALIDATION, BosonLabException
from bmfl.schemas.model import translate_validation_error
from bmfl.schemas.run_config import RunConfig
from bmfl.utils.output import write_rows

logger = logging.getLogger("bmfl")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmfl",
        description=f"{settings.APP_NAME} {settings.APP_VERSION}: exact spectra and mean-field diagnostics for bosons.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(
            name,
            help=command.summary,
            description=command.description,
            epilog="Columns: " + ", ".join(command.all_columns(RunConfig(subcommand=name))),
        )
        command.add_arguments(sub)
        sub.add_argument("--seed", type=int, default=0, help="Random seed (default 0)")
        sub.add_argument("--output", type=Path, default=None, help="Output file (default stdout)")
        sub.add_argument("--format", choices=["csv", "json"], default="csv")
        sub.add_argument("--dim-cap", type=int, default=None, help="Override BMFL_DIM_CAP")
        sub.add_argument("--max-iterations", type=int, default=None, help="Override iteration caps")
        sub.add_argument("--log-level", default=None, help="Logging level (default from BMFL_LOG_LEVEL)")
    return parser


def configure_logging(level: Optional[str] = None) -> None:
    """Root handler on stderr; stdout carries only results."""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def model_hash(path: Optional[Path]) -> str:
    """First 12 hex digits of the SHA-256 of the input file."""
    if path is None or not Path(path).is_file():
        return ""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """
    Parse arguments, run one subcommand and write its rows.

    Returns:
        0 on success, 2 on validation errors, 3 on non-convergence or a
        failed identity, 4 on capacity errors, 1 on anything unexpected
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else EXIT_VALIDATION

    configure_logging(args.log_level)
    saved = (settings.DIM_CAP, settings.EIGEN_MAX_ITERATIONS, settings.HARTREE_MAX_ITERATIONS)
    try:
        options = {k: v for k, v in vars(args).items() if v is not None}
        config = RunConfig.model_validate(options)

        if config.dim_cap is not None:
            settings.DIM_CAP = config.dim_cap
        if config.max_iterations is not None:
            settings.EIGEN_MAX_ITERATIONS = config.max_iterations
            settings.HARTREE_MAX_ITERATIONS = config.max_iterations

        command = COMMANDS[config.subcommand]
        rows = command.execute(config)
        provenance = {
            "subcommand": config.subcommand,
            "model_hash": model_hash(config.model or config.measure),
            "seed": config.seed,
            "schedule_key": config.schedule_key,
        }
        rows = [provenance | row for row in rows]
        write_rows(rows, command.all_columns(config), config.format, config.output, stdout)
        logger.info(f"{config.subcommand}: wrote {len(rows)} rows")
        return command.status(rows) if command.status else 0

    except ValidationError as exc:
        error = translate_validation_error(exc)
        logger.error(error.message)
        return error.exit_code
    except BosonLabException as exc:
        logger.error(exc.message)
        return exc.exit_code
    except Exception:
        logger.exception("Unexpected error")
        return 1
    finally:
        settings.DIM_CAP, settings.EIGEN_MAX_ITERATIONS, settings.HARTREE_MAX_ITERATIONS = saved


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
