"""
Shared pieces of the subcommands: registration record and argument types.
"""
import argparse
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from bmfl.core.exceptions import ValidationException
from bmfl.models.operators import ModelSpec
from bmfl.schemas.run_config import RunConfig
from bmfl.services.model_service import model_service

PROVENANCE = ["subcommand", "model_hash", "seed", "schedule_key"]


@dataclass(frozen=True)
class Command:
    """
    One subcommand.

    `columns(config)` lists the data columns in output order; `execute`
    returns one dict per row. `status(rows)` may turn finished rows into a
    non-zero exit code.
    """

    name: str
    summary: str
    description: str
    add_arguments: Callable[[argparse.ArgumentParser], None]
    columns: Callable[[RunConfig], list[str]]
    execute: Callable[[RunConfig], list[dict]]
    status: Optional[Callable[[list[dict]], int]] = None

    def all_columns(self, config: RunConfig) -> list[str]:
        return PROVENANCE + self.columns(config)


def int_list(text: str) -> list[int]:
    """Parse '2,4,8' into [2, 4, 8]."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def add_model_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="Model file (JSON)")


def require(value, field: str):
    if value is None:
        raise ValidationException("is required", path=field)
    return value


def load_model(config: RunConfig) -> ModelSpec:
    return model_service.load_model(require(config.model, "model"))


def fixed_columns(names: Sequence[str]) -> Callable[[RunConfig], list[str]]:
    def columns(_: RunConfig) -> list[str]:
        return list(names)

    return columns


def hartree_options(config: RunConfig) -> dict:
    """Optimizer overrides taken from the command line."""
    return {"restarts": config.restarts, "max_iterations": config.max_iterations}
