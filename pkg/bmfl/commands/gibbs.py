"""
`gibbs` - canonical free energies along an N schedule.
"""
import argparse

from bmfl.commands.base import (
    Command,
    add_model_argument,
    fixed_columns,
    float_list,
    hartree_options,
    int_list,
    load_model,
)
from bmfl.core.exceptions import ValidationException
from bmfl.schemas.run_config import RunConfig
from bmfl.services.gibbs_service import gibbs_service

COLUMNS = ["n", "beta", "free_energy", "free_energy_per_particle", "ground_energy", "gap", "variational"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--beta", type=float_list, required=True, help="Inverse temperatures, e.g. 1,2")
    parser.add_argument("--n-schedule", type=int_list, required=True, help="Increasing particle counts")


def execute(config: RunConfig) -> list[dict]:
    if not config.n_schedule:
        raise ValidationException("must not be empty", path="n_schedule")
    model = load_model(config)
    rows = []
    for beta in config.beta:
        records = gibbs_service.finite_temperature_sweep(
            model, config.n_schedule, beta, seed=config.seed, **hartree_options(config)
        )
        rows += [record.model_dump() | {"n": record.particles} for record in records]
    return rows


command = Command(
    name="gibbs",
    summary="Free energy E(beta, N) and its gap to e_H",
    description="Full-spectrum Gibbs states; every point is checked against E(beta, N) <= E(N).",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
