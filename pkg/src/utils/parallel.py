"""Order-preserving thread fan-out for embarrassingly parallel experiment axes."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply `func` to every item, optionally on a thread pool.

    Results come back in input order whatever the thread count, so reports
    assembled from them are identical for any `threads` value.

    Args:
        func: Task function; must only read shared inputs
        items: Task inputs
        threads: Worker count (1 runs inline)

    Returns:
        List of results in input order
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(threads, len(items))
    logger.debug(f"Dispatching {len(items)} tasks to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
