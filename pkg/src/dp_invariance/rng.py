"""Deterministic random substreams and worker control.

All randomness in the package flows from a single integer seed through
keyed substreams: ``substream(seed, *path)`` builds an independent
generator whose output is a pure function of the key tuple. Batch
samplers split their draws into fixed-size chunks, one substream per
chunk, so draw ``d`` depends only on ``(seed, path, d)`` — never on how
chunks are scheduled across threads. The ``DP_INVARIANCE_THREADS``
environment variable caps the worker count and has no effect on values.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
U = TypeVar("U")

# Chunks aim for ~4M scalar draws each; small enough to bound buffer
# memory in the fallback backend, large enough to amortize stream setup.
_CHUNK_TARGET = 4_194_304
_MAX_CHUNK_DRAWS = 4096


def bit_generator(seed: int, *path: int) -> np.random.SFC64:
    """Bit generator for the substream keyed by (seed, *path)."""
    return np.random.SFC64(np.random.SeedSequence([int(seed), *map(int, path)]))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream keyed by (seed, *path)."""
    return np.random.Generator(bit_generator(seed, *path))


def chunk_draws(n_values_per_draw: int) -> int:
    """Draws per chunk; a fixed function of the per-draw cost only."""
    per_draw = max(1, int(n_values_per_draw))
    return max(1, min(_MAX_CHUNK_DRAWS, _CHUNK_TARGET // per_draw))


def chunk_ranges(n_draws: int, n_values_per_draw: int) -> list[tuple[int, int, int]]:
    """(chunk_index, start, stop) triples covering range(n_draws)."""
    size = chunk_draws(n_values_per_draw)
    return [
        (c, start, min(start + size, n_draws))
        for c, start in enumerate(range(0, n_draws, size))
    ]


def worker_count() -> int:
    """Worker cap from DP_INVARIANCE_THREADS (default 1, minimum 1)."""
    raw = os.environ.get("DP_INVARIANCE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], U], items: Sequence[T] | Iterable[T]) -> list[U]:
    """Map preserving input order; threads capped by worker_count().

    Results are identical for any worker count because every item carries
    its own substream key.
    """
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
