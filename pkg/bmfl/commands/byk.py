"""
`byk` - scaled k-particle energies b_k(lambda).
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, fixed_columns, int_list, load_model
from bmfl.schemas.run_config import RunConfig
from bmfl.services.spectra_service import spectra_service

COLUMNS = ["k", "lambda", "b_k", "precondition", "monotone", "lipschitz_constant", "lipschitz_ok"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--k", type=int_list, required=True, help="Orders, e.g. 2,3,4")
    parser.add_argument("--lambda-grid", type=int, default=20, help="Grid intervals; lambda = i/grid")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    table = spectra_service.scaled_energy_scan(model, config.k, config.lambda_grid)
    rows = []
    for k, values, pre, mono in zip(table.k_values, table.values, table.precondition, table.monotone):
        for lam, value in zip(table.grid, values):
            rows.append({
                "k": k,
                "lambda": lam,
                "b_k": value,
                "precondition": pre,
                "monotone": mono,
                "lipschitz_constant": table.lipschitz_constant,
                "lipschitz_ok": table.lipschitz_ok,
            })
    return rows


command = Command(
    name="byk",
    summary="b_k(lambda) tables with monotonicity and Lipschitz checks",
    description="Ground energies per particle of k bosons with interaction scaled by lambda/(k-1).",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
