"""Reproducible random streams and a replicate pool.

Every stream is a Philox counter-based generator keyed by ``(seed, stream_id)``.
Replicate ``i`` of an experiment always draws from ``stream.child(i)``, so the
numbers it sees do not depend on how replicates are spread over workers.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        # hash (stream_id, index) so nested children do not collide
        ss = np.random.SeedSequence(entropy=[self.stream_id, int(index), 0x5EED])
        sid = int(ss.generate_state(1, dtype=np.uint64)[0])
        return RngStream(self.seed, sid)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a Generator, an int seed or None."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def map_indexed(func, n_items, stream, threads=1, chunk=256):
    """Evaluate ``func(i, stream.child(i))`` for ``i < n_items``.

    Results come back in index order whatever ``threads`` is.
    """
    if not isinstance(stream, RngStream):
        raise TypeError("map_indexed needs an RngStream")

    def run(lo, hi):
        return [func(i, stream.child(i)) for i in range(lo, hi)]

    bounds = [(lo, min(lo + chunk, n_items)) for lo in range(0, n_items, chunk)]
    if threads <= 1 or len(bounds) <= 1:
        out = []
        for lo, hi in bounds:
            out.extend(run(lo, hi))
        return out
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda b: run(*b), bounds))
    return [r for part in parts for r in part]


def map_replicates(func, n_replicates, stream, threads=1, chunk=256):
    """Evaluate ``func(stream.child(i))`` for ``i < n_replicates``, in replicate order."""
    if not isinstance(stream, RngStream):
        raise TypeError("map_replicates needs an RngStream")
    return map_indexed(lambda i, child: func(child), n_replicates, stream, threads, chunk)
