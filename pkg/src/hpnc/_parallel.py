import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker cap from HPNC_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("HPNC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map, threaded when HPNC_THREADS > 1. numpy releases the GIL."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
