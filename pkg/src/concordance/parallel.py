"""Worker-count resolution and a small deterministic task runner.

Results never depend on the worker count: tasks are pure functions of
their arguments and the runner returns results in submission order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

from .errors import ConfigurationError

WORKERS_ENV_VAR = "CONCORDANCE_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else the CONCORDANCE_WORKERS variable, else all CPUs."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env is not None:
            try:
                workers = int(env)
            except ValueError as exc:
                raise ConfigurationError(
                    f"{WORKERS_ENV_VAR} must be an integer, got {env!r}"
                ) from exc
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {workers}")
    return workers


def run_tasks(fn: Callable[[T], R], args: Sequence[T], workers: int) -> list[R]:
    """Apply fn to every argument, in order, optionally across processes."""
    if workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=min(workers, len(args))) as pool:
        return list(pool.map(fn, args))
