"""
`verify` - identity suite on a random state of the model.
"""
import argparse

from bmfl.commands.base import Command, add_model_argument, fixed_columns, load_model, require
from bmfl.core.exceptions import EXIT_CONVERGENCE
from bmfl.schemas.run_config import RunConfig
from bmfl.services.verify_service import verify_service

COLUMNS = ["identity", "value", "tolerance", "status"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--n", type=int, required=True, help="Particle count N")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    checks = verify_service.run_identity_suite(model, require(config.n, "n"), config.seed)
    return [
        {
            "identity": check.name,
            "value": check.value,
            "tolerance": check.tolerance,
            "status": "PASS" if check.passed else "FAIL",
        }
        for check in checks
    ]


def status(rows: list[dict]) -> int:
    return EXIT_CONVERGENCE if any(row["status"] == "FAIL" for row in rows) else 0


command = Command(
    name="verify",
    summary="PASS/FAIL per exact identity",
    description="Marginal consistency, localization identities, binomial bound, gradient and energy checks.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
    status=status,
)
