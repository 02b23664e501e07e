import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def resolve_threads(threads=None) -> int:
    """Explicit value, else ``UCF_THREADS``, else 1."""
    if threads is None:
        threads = os.environ.get("UCF_THREADS") or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def pmap(fn, items, threads=None) -> list:
    """Ordered map; results are position-addressed so worker count never matters."""
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def derive_seed(master: int, *keys: int) -> int:
    """64-bit child seed from a master seed and integer keys."""
    seq = np.random.SeedSequence([int(master), *map(int, keys)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])
