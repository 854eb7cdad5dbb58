"""
`sweep` - mean-field convergence along an N schedule.
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, hartree_options, int_list, load_model
from bmfl.core.exceptions import ValidationException
from bmfl.schemas.run_config import RunConfig
from bmfl.services.spectra_service import spectra_service

BASE_COLUMNS = [
    "n", "energy", "energy_per_particle", "hartree_energy", "gap", "residual", "spectral_gap", "parity",
]
FLAG_COLUMNS = ["monotone", "gap_nonnegative", "gap_non_increasing"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--n-schedule", type=int_list, required=True, help="Increasing particle counts, e.g. 2,4,8")
    parser.add_argument("--k", type=int_list, default=[1, 2], help="Condensate overlap orders (default 1,2)")


def columns(config: RunConfig) -> list[str]:
    overlaps = []
    for k in config.k:
        overlaps += [f"overlap_k{k}", f"mixture_overlap_k{k}"]
    return BASE_COLUMNS + overlaps + FLAG_COLUMNS


def execute(config: RunConfig) -> list[dict]:
    if not config.n_schedule:
        raise ValidationException("must not be empty", path="n_schedule")
    model = load_model(config)
    report = spectra_service.mean_field_sweep(
        model, config.n_schedule, config.k, seed=config.seed, **hartree_options(config)
    )
    rows = []
    for record in report.records:
        row = {
            "n": record.particles,
            "energy": record.energy,
            "energy_per_particle": record.energy_per_particle,
            "hartree_energy": report.hartree_energy,
            "gap": record.gap,
            "residual": record.residual,
            "spectral_gap": record.spectral_gap,
            "parity": record.parity,
            "monotone": report.monotone,
            "gap_nonnegative": report.gap_nonnegative,
            "gap_non_increasing": report.gap_non_increasing,
        }
        for k in config.k:
            row[f"overlap_k{k}"] = record.overlaps.get(k)
            row[f"mixture_overlap_k{k}"] = record.mixture_overlaps.get(k)
        rows.append(row)
    return rows


command = Command(
    name="sweep",
    summary="E(N)/N, gaps to e_H and condensate overlaps along a schedule",
    description="Exact ground states for each N of the schedule compared with the Hartree minimum.",
    add_arguments=add_arguments,
    columns=columns,
    execute=execute,
)
