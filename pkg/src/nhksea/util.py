"""Small helpers: inclusive ranges, thread count resolution, ordered parallel map."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InvalidParameterError

THREADS_ENV = "NONHERM_THREADS"


def inclusive_range(start: float, stop: float, step: float) -> np.ndarray:
    """Samples start, start + step, ... below stop; stop itself is kept when it
    lies an exact number of steps from start (up to 1e-9 of a step).
    """
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise InvalidParameterError("range bounds must be finite")
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    if stop < start:
        raise InvalidParameterError(f"empty range {start}:{stop}:{step}")
    n = (stop - start) / step
    k = round(n)
    if abs(n - k) < 1e-9:
        count = k + 1
    else:
        count = math.ceil(n)
    if count < 1:
        raise InvalidParameterError(f"empty range {start}:{stop}:{step}")
    return start + step * np.arange(count)


def resolve_threads(threads: int | None = None) -> int:
    """Explicit argument, else NONHERM_THREADS, else 1."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError as exc:
                raise InvalidParameterError(f"{THREADS_ENV}={env!r} is not an integer") from exc
        else:
            threads = 1
    if threads < 1:
        raise InvalidParameterError("thread count must be >= 1")
    return threads


def parallel_map(fn, items, threads: int | None = None) -> list:
    """Apply ``fn`` to each item; results come back in input order.

    numpy releases the GIL in its heavy kernels, so threads give real
    speed-up for the per-point scans without pickling overhead.
    """
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
