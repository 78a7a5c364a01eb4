"""Per-path random streams and a deterministic chunked parallel map.

Path ``i`` under master seed ``s`` always draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``, so a path's variates do not depend
on how paths are grouped into chunks or on how many worker threads run.
Chunk results are reassembled in index order, and any reduction happens
afterwards on the assembled array, so outputs are identical for every
thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .distributions import _U_MIN

THREADS_ENV = "MAXSCHEME_THREADS"


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        return max(1, int(value))
    return 1


def path_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def path_uniforms(seed: int, indices: Sequence[int], count: int) -> np.ndarray:
    """Matrix (len(indices), count) of open-interval uniforms, row i from path indices[i]."""
    out = np.empty((len(indices), count))
    for row, i in enumerate(indices):
        out[row] = path_rng(seed, int(i)).random(count)
    np.maximum(out, _U_MIN, out=out)
    return out


def chunk_bounds(total: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def map_chunks(func: Callable[[int, int], np.ndarray], total: int, chunk: int,
               threads: int | None = None) -> np.ndarray:
    """Evaluate ``func(lo, hi)`` on consecutive index ranges and stack the results."""
    bounds = chunk_bounds(total, chunk)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(bounds) == 1:
        parts = [func(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: func(*b), bounds))
    return np.concatenate(parts, axis=0)
