"""Deterministic fan-out of per-sample work over a process pool."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np


def shards(count: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, count))
    edges = np.linspace(0, count, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_samples(func: Callable, payload, count: int, workers: int = 1) -> dict:
    """Run ``func(payload, start, stop)`` over index shards and concatenate in index order."""
    parts = shards(count, workers)
    if workers <= 1 or len(parts) == 1:
        chunks = [func(payload, a, b) for a, b in parts]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(func, payload, a, b) for a, b in parts]
            chunks = [f.result() for f in futures]
    return {key: np.concatenate([c[key] for c in chunks]) for key in chunks[0]}
