"""
`definetti` - hierarchy of an atomic de Finetti measure.
"""
import argparse

import numpy as np

from bmfl.commands.base import Command, fixed_columns, int_list, require
from bmfl.schemas.run_config import RunConfig
from bmfl.services.definetti_service import definetti_service

COLUMNS = ["order", "trace", "trace_law", "finite_n_match", "matrix"]


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--measure", required=True, help="Measure file (JSON)")
    parser.add_argument("--k", type=int_list, required=True, help="Largest hierarchy order")
    parser.add_argument("--match-n", type=int, default=None, help="Compare with the N-particle mixture")


def execute(config: RunConfig) -> list[dict]:
    measure = definetti_service.load_measure(require(config.measure, "measure"))
    masses = measure.masses
    rows = []
    for order in range(max(config.k) + 1):
        hierarchy = definetti_service.hierarchy(measure, order)
        match = None
        if config.match_n is not None and order <= config.match_n:
            match = definetti_service.finite_N_match(measure, config.match_n, order)
        rows.append({
            "order": order,
            "trace": float(np.real(hierarchy.trace)),
            "trace_law": float(np.sum(measure.weights * masses ** order)),
            "finite_n_match": match,
            "matrix": hierarchy.matrix,
        })
    return rows


command = Command(
    name="definetti",
    summary="Hierarchy sum_i w_i |u_i^k><u_i^k| for k = 0..K",
    description="Traces against the law sum_i w_i ||u_i||^(2k), optionally matched to an N-particle mixture.",
    add_arguments=add_arguments,
    columns=fixed_columns(COLUMNS),
    execute=execute,
)
