import os
from concurrent.futures import ThreadPoolExecutor


def worker_count(requested=None) -> int:
    """Thread count, capped by the PCVI_THREADS environment variable."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("PCVI_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def pmap(fn, items, workers=None):
    """Order-preserving map over a thread pool (serial when one worker)."""
    items = list(items)
    n = min(worker_count(workers), len(items)) if items else 1
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
