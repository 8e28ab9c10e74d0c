"""Counter-based random substreams keyed by (master seed, label path).

Every random draw in the package comes from a ``numpy.random.Generator``
backed by a Philox bit generator whose 128-bit key is a BLAKE2b digest of a
length-prefixed encoding of ``(master_seed, labels)``. The counter starts at
zero, so a substream depends only on its key: results never depend on how
replicates are scheduled across workers.

The encoding below is part of the reproducibility contract and must not change.
"""

from __future__ import annotations

import hashlib
import os
import struct
import threading
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_DOMAIN = b"wboot.substream.v1"


def _encode(master_seed: int, labels: Sequence[int]) -> bytes:
    parts = [_DOMAIN, struct.pack("<Q", master_seed & 0xFFFFFFFFFFFFFFFF),
             struct.pack("<Q", len(labels))]
    for lab in labels:
        if lab < 0:
            raise ValueError(f"substream labels must be nonnegative, got {lab}")
        parts.append(struct.pack("<Q", int(lab)))
    return b"".join(parts)


def substream_key(master_seed: int, labels: Sequence[int]) -> int:
    """128-bit Philox key for ``(master_seed, labels)``."""
    digest = hashlib.blake2b(_encode(master_seed, labels), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def derive_substream(master_seed: int, labels: Sequence[int]) -> np.random.Generator:
    """Return an independent generator for the label path under ``master_seed``.

    Label paths are length-prefixed, so ``(1, 2)`` and ``(12,)`` never collide.
    """
    labels = tuple(int(x) for x in labels)
    if not labels:
        raise ValueError("labels must be non-empty")
    return np.random.Generator(np.random.Philox(key=substream_key(master_seed, labels)))


def worker_count() -> int:
    """Worker cap from ``WBOOT_THREADS`` (default 1). Affects speed only."""
    raw = os.environ.get("WBOOT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


_local = threading.local()


def parallel_map(fn, items) -> list:
    """Ordered ``[fn(x) for x in items]`` on up to ``worker_count()`` threads.

    Calls made from inside a worker run serially, so nesting never
    multiplies the thread count.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1 or getattr(_local, "inside", False):
        return [fn(x) for x in items]

    def run(x):
        _local.inside = True
        try:
            return fn(x)
        finally:
            _local.inside = False

    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(run, items))


def map_blocks(total: int, block: int, fn, seed: int, labels: Sequence[int]) -> list:
    """Apply ``fn(rng, start, size)`` to consecutive blocks of ``range(total)``.

    Block ``b`` gets substream ``labels + (b,)``; results come back in block
    order, so they do not depend on the worker count.
    """
    labels = tuple(int(x) for x in labels)
    starts = list(range(0, int(total), int(block)))
    return parallel_map(
        lambda b: fn(derive_substream(seed, labels + (b,)), starts[b], min(block, total - starts[b])),
        range(len(starts)))
