"""Optional thread parallelism, capped by the ``RGRAPH_THREADS`` variable.

Results never depend on the thread count: work items carry their own RNG
streams and results come back in submission order.
"""
import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    raw = os.environ.get("RGRAPH_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_ordered(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
