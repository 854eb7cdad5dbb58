"""
`curve` - binding curve of the Hartree energy in the mass.
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, fixed_columns, hartree_options, load_model
from bmfl.schemas.run_config import RunConfig
from bmfl.services.hartree_service import hartree_service

COLUMNS = [
    "lambda", "e_h", "e_h_free", "margin",
    "margins_nonnegative", "strict_binding", "free_nonpositive", "kinetic_condition",
]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--grid", type=int, default=20, help="Grid intervals; lambda = i/grid")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    curve = hartree_service.energy_curve(model, config.grid, seed=config.seed, **hartree_options(config))
    return [
        {
            "lambda": lam,
            "e_h": value,
            "e_h_free": free,
            "margin": margin,
            "margins_nonnegative": curve.margins_nonnegative,
            "strict_binding": curve.strict_binding,
            "free_nonpositive": curve.free_nonpositive,
            "kinetic_condition": curve.kinetic_condition,
        }
        for lam, value, free, margin in zip(curve.grid, curve.values, curve.free_values, curve.margins)
    ]


command = Command(
    name="curve",
    summary="Binding margins e_H(lambda) + e0_H(1 - lambda) - e_H(1)",
    description="Hartree energies of the model and of its potential-free part on a mass grid.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
