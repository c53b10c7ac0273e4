"""Optional thread fan-out for per-angle loops.

The env var RADON_LENS_THREADS caps internal parallelism; unset or "1"
means serial.  Results are always collected in submission order, so output
accumulation is deterministic either way.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    raw = os.environ.get("RADON_LENS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"RADON_LENS_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def ordered_map(fn, items):
    """map() preserving order, threaded when RADON_LENS_THREADS > 1."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
