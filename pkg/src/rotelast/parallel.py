"""Worker-count policy and an order-preserving thread map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "ROTELAST_THREADS"


def worker_count() -> int:
    """Positive integer from ``ROTELAST_THREADS``, else the number of usable cores."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        try:
            return max(1, len(os.sched_getaffinity(0)))
        except AttributeError:
            return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items) -> list:
    """``[fn(x) for x in items]`` spread over worker threads; results keep input order.

    The numpy kernels release the GIL, so threads give real overlap here.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
