"""
`hartree` - Hartree minimum at a given mass.
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, fixed_columns, load_model
from bmfl.schemas.run_config import RunConfig
from bmfl.services.hartree_service import hartree_service

COLUMNS = [
    "mass", "energy", "iterations", "gradient_norm", "restarts", "converged",
    "certified", "grid_energy", "mixed_energy", "mixed_rank", "minimizer",
]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--mass", type=float, default=1.0, help="Constraint ||u||^2 = mass in (0, 1]")
    parser.add_argument("--restarts", type=int, default=None, help="Random restarts")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    result = hartree_service.minimize(
        model,
        config.mass,
        restarts=config.restarts,
        max_iterations=config.max_iterations,
        seed=config.seed,
        certify=True,
    )
    row = {
        "mass": result.mass,
        "energy": result.energy,
        "iterations": result.iterations,
        "gradient_norm": result.gradient_norm,
        "restarts": result.restarts,
        "converged": result.converged,
        "certified": result.certified,
        "grid_energy": result.grid_energy,
        "mixed_energy": None,
        "mixed_rank": None,
        "minimizer": result.minimizer,
    }
    if config.mass == 1.0:
        mixed = hartree_service.minimize_mixed(
            model, restarts=config.restarts, max_iterations=config.max_iterations, seed=config.seed
        )
        row["mixed_energy"] = mixed.energy
        row["mixed_rank"] = mixed.rank
    return [row]


command = Command(
    name="hartree",
    summary="Hartree minimum e_H(mass) and minimizer",
    description="Projected gradient descent with restarts; the minimizer is written as [re, im] pairs.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
