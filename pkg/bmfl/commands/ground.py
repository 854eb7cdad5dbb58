"""
`ground` - ground-state energy of H_N.
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, fixed_columns, load_model, require
from bmfl.schemas.run_config import RunConfig
from bmfl.services.spectra_service import spectra_service

COLUMNS = ["n", "energy", "energy_per_particle", "residual", "spectral_gap", "symmetric_sector"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--n", type=int, required=True, help="Particle count N")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    ground = spectra_service.ground_energy(model, require(config.n, "n"))
    return [{
        "n": ground.particles,
        "energy": ground.energy,
        "energy_per_particle": ground.energy_per_particle,
        "residual": ground.residual,
        "spectral_gap": ground.spectral_gap,
        "symmetric_sector": ground.symmetric_sector,
    }]


command = Command(
    name="ground",
    summary="Ground-state energy E(N)",
    description="Smallest eigenvalue of H_N with its residual.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
