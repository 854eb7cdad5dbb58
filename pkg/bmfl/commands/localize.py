"""
`localize` - localization profile of the ground state on a set of sites.
"""
import argparse
from typing import Callable

import numpy as np

from bmfl.commands.base import Command, add_model_argument, fixed_columns, int_list, load_model, require
from bmfl.core.exceptions import ValidationException
from bmfl.models.localization import LocalizingOperator
from bmfl.schemas.run_config import RunConfig
from bmfl.services.localize_service import localize_service
from bmfl.services.spectra_service import spectra_service

COLUMNS = ["k", "trace", "complement_trace", "statistic", "escape_statistic", "total_mass", "duality_defect"]


def parse_statistic(text: str) -> Callable[[float], float]:
    """lambda, lambda2 or indicator:a,b."""
    if text == "lambda":
        return lambda x: x
    if text == "lambda2":
        return lambda x: x * x
    if text.startswith("indicator:"):
        try:
            a, b = (float(v) for v in text.split(":", 1)[1].split(","))
        except ValueError:
            raise ValidationException(f"expected indicator:a,b, got '{text}'", path="f")
        return lambda x: 1.0 if a <= x <= b else 0.0
    raise ValidationException(f"unknown statistic '{text}'", path="f")


def add_arguments(parser: argparse.ArgumentParser) -> None:
    add_model_argument(parser)
    parser.add_argument("--n", type=int, required=True, help="Particle count N")
    parser.add_argument("--sites", type=int_list, required=True, help="1-based sites of the projector, e.g. 1,2")
    parser.add_argument("--f", default="lambda", help="Statistic: lambda | lambda2 | indicator:a,b")


def execute(config: RunConfig) -> list[dict]:
    model = load_model(config)
    f = parse_statistic(config.f)
    if not config.sites:
        raise ValidationException("must not be empty", path="sites")
    if max(config.sites) > model.modes:
        raise ValidationException(f"site {max(config.sites)} exceeds the {model.modes} modes", path="sites")

    operator = LocalizingOperator.projector_onto_sites(model.modes, [s - 1 for s in config.sites])
    state = spectra_service.ground_energy(model, require(config.n, "n")).state
    traces = localize_service.localized_traces(state, operator)
    complement = localize_service.localized_traces(state, operator.complement())
    statistic = localize_service.statistic_from_traces(traces, f)
    escape = localize_service.statistic_from_traces(complement, f)
    duality = float(np.max(np.abs(traces - complement[::-1])))
    return [
        {
            "k": k,
            "trace": float(trace),
            "complement_trace": float(other),
            "statistic": statistic,
            "escape_statistic": escape,
            "total_mass": float(traces.sum()),
            "duality_defect": duality,
        }
        for k, (trace, other) in enumerate(zip(traces, complement))
    ]


command = Command(
    name="localize",
    summary="Tr G^P_{N,k} of the ground state for a site projector P",
    description="Localized traces, complement traces and the statistic sum_k f(k/N) Tr G_k.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
