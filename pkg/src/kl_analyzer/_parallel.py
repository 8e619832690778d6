"""Optional thread fan-out, capped by KL_ANALYZER_THREADS (default 1).

Results are always collected in submission order, so parallel and
serial runs produce identical output.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    raw = os.environ.get("KL_ANALYZER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def run_ordered(fn, items):
    """[fn(item) for item in items], possibly fanned out over threads."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
