"""Worker-count control and deterministic fan-out for parallel sections.

The environment variable ``MARGIN_DISCRIM_THREADS`` caps how many worker
threads the oracle multi-starts, simulation chunks, and decomposition
starts may use.  Results are always merged in task order, so the output
never depends on the actual worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "MARGIN_DISCRIM_THREADS"


def worker_count() -> int:
    limit = os.environ.get(THREADS_ENV)
    available = os.cpu_count() or 1
    if limit is None:
        return available
    try:
        requested = int(limit)
    except ValueError:
        return available
    return max(1, min(available, requested))


def map_ordered(fn, items):
    """Apply ``fn`` to each item, in parallel when allowed, preserving order."""
    items = list(items)
    workers = min(worker_count(), len(items)) if items else 1
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
