"""Deterministic process-pool helpers.

Results never depend on the worker count: work is split into contiguous
chunks and merged in input order.
"""

from __future__ import annotations

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

ENV_THREADS = "CONTRASTIVE_VC_THREADS"


def resolve_workers(requested: int | None = None) -> int:
    env = os.environ.get(ENV_THREADS)
    if env:
        return max(1, int(env))
    if requested is None:
        return os.cpu_count() or 1
    return max(1, int(requested))


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    size, extra = divmod(n, parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out


def _scan(fn, items, offset):
    for i, item in enumerate(items):
        value = fn(item)
        if value is not None:
            return offset + i, value
    return None


def _apply(fn, items):
    return [fn(item) for item in items]


def _pool(workers: int) -> ProcessPoolExecutor:
    return ProcessPoolExecutor(workers, mp_context=multiprocessing.get_context("fork"))


def first_hit(fn: Callable, items: Sequence, workers: int = 1):
    """``(index, fn(item))`` for the lowest-index item where ``fn`` returns
    something other than ``None``; ``None`` if there is no such item."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return _scan(fn, items, 0)
    with _pool(workers) as ex:
        futures = [ex.submit(_scan, fn, items[r.start:r.stop], r.start)
                   for r in _chunks(len(items), workers * 4)]
        hits = [f.result() for f in futures]
    hits = [h for h in hits if h is not None]
    return min(hits, key=lambda h: h[0]) if hits else None


def map_ordered(fn: Callable, items: Sequence, workers: int = 1) -> list:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return _apply(fn, items)
    with _pool(workers) as ex:
        futures = [ex.submit(_apply, fn, items[r.start:r.stop])
                   for r in _chunks(len(items), workers * 4)]
        out = []
        for f in futures:
            out.extend(f.result())
    return out
