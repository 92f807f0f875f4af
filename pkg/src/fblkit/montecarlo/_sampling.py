"""Shared sampling and work-splitting helpers for the Monte Carlo routines."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import InvalidParameterError

# 32-bit Philox stream tags, one per consumer of random numbers
STREAM_ENSEMBLE = 1
STREAM_FIXED = 2
STREAM_CODEBOOK = 3
STREAM_LLN = 4
STREAM_GAUSS = 5

_CHUNK_BUDGET = 1 << 21  # uniforms held in memory per chunk


def cdf(probs):
    """Cumulative sums with the tail pinned to exactly 1 after the last atom."""
    probs = np.asarray(probs, dtype=float)
    c = np.cumsum(probs, axis=-1)
    last = np.flatnonzero(probs)[-1]
    c[last:] = 1.0
    return c


def categorical(u, cum):
    """Inverse-CDF draw; zero-mass symbols are never returned."""
    return np.searchsorted(cum, u, side="right")


def worker_count(threads=None):
    """Worker count: explicit argument, else CPU count; FBLKIT_THREADS caps both."""
    n = threads if threads is not None else min(os.cpu_count() or 1, 8)
    cap = os.environ.get("FBLKIT_THREADS")
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise InvalidParameterError(f"FBLKIT_THREADS must be an integer, got {cap!r}")
    return max(1, int(n))


def chunked(trials, per_trial):
    """Split ``range(trials)`` into chunks sized only by the per-trial load.

    The partition never depends on the worker count.
    """
    size = max(1, _CHUNK_BUDGET // max(1, per_trial))
    return [np.arange(a, min(a + size, trials)) for a in range(0, trials, size)]


def run_chunks(fn, chunks, threads=None):
    """Map ``fn`` over chunks, returning results in chunk order."""
    workers = worker_count(threads)
    if workers == 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def check_trials(trials):
    if int(trials) != trials or trials < 1:
        raise InvalidParameterError(f"trials must be a positive integer, got {trials!r}")
    return int(trials)
