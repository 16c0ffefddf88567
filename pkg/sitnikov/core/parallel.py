"""
Worker-count resolution and an order-preserving parallel map for row sweeps.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from .errors import PreconditionViolated

logger = logging.getLogger(__name__)

THREADS_ENV = "SITNIKOV_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def worker_cap() -> int:
    """Upper bound on workers: $SITNIKOV_THREADS if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise PreconditionViolated(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise PreconditionViolated(f"{THREADS_ENV} must be >= 1, got {cap}")
    return cap


def resolve_workers(requested: Optional[int] = None) -> int:
    cap = worker_cap()
    return max(1, min(requested or cap, cap))


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply fn to every item, in a process pool when workers > 1.

    Results come back in input order regardless of completion order. fn must
    be picklable (a module-level function or a functools.partial of one).
    """
    items = list(items)
    workers = min(workers, len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    logger.info("mapping %d rows over %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
