"""
Deterministic job runner.

Jobs are independent callables keyed by a sortable key; results come back
ordered by key regardless of completion order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Hashable, Mapping, Optional, TypeVar

from bmfl.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")


def run_jobs(jobs: Mapping[Hashable, Callable[[], T]], workers: Optional[int] = None) -> list[tuple[Hashable, T]]:
    """
    Run independent jobs and return (key, result) pairs sorted by key.

    Args:
        jobs: Mapping from job key to a zero-argument callable
        workers: Thread count, defaults to settings.WORKERS

    Returns:
        List of (key, result) pairs in ascending key order
    """
    workers = workers or settings.WORKERS
    keys = sorted(jobs)
    if workers == 1 or len(keys) <= 1:
        return [(key, jobs[key]()) for key in keys]

    logger.debug(f"Running {len(keys)} jobs on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {key: pool.submit(jobs[key]) for key in keys}
        return [(key, futures[key].result()) for key in keys]
