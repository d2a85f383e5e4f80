"""
Grid-point dispatch for scans.
Each grid point is an independent computation; results come back in
submission order no matter which worker finishes first.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from ffcorr.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Apply ``fn`` to every item, in parallel when threads > 1, preserving order."""
    items = list(items)
    threads = settings.default_threads if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("dispatching %d grid points to %d threads", len(items), threads)
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="ffcorr-grid") as pool:
        return list(pool.map(fn, items))
