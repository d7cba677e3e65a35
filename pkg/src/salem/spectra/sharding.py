"""Disjoint shard definitions and a deterministic worker pool."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TypeVar

logger = logging.getLogger(__name__)

_SHARD_ID_PREFIX = "coeff_box"

T = TypeVar("T")
R = TypeVar("R")


def partition_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Split the closed range [lo, hi] into at most ``parts`` contiguous closed ranges."""
    if parts <= 0:
        raise ValueError("parts must be positive")
    if lo > hi:
        raise ValueError("range must satisfy lo <= hi")
    size = hi - lo + 1
    parts = min(parts, size)
    step, extra = divmod(size, parts)
    pieces = []
    start = lo
    for idx in range(parts):
        stop = start + step + (1 if idx < extra else 0) - 1
        pieces.append((start, stop))
        start = stop + 1
    return pieces


@dataclass(frozen=True)
class Shard:
    """A sub-box of the free-coefficient box, ranges closed on both ends."""

    ranges: tuple[tuple[int, int], ...]
    shard_id: str = f"{_SHARD_ID_PREFIX}:auto"

    def __post_init__(self) -> None:
        if not self.ranges:
            raise ValueError("shard needs at least one coefficient range")
        for idx, pair in enumerate(self.ranges):
            if len(pair) != 2:
                raise ValueError(f"range {idx} requires lo/hi bounds")
            if pair[0] > pair[1]:
                raise ValueError(f"range {idx} must satisfy lo <= hi")
        object.__setattr__(self, "ranges", tuple((int(lo), int(hi)) for lo, hi in self.ranges))

    @property
    def size(self) -> int:
        total = 1
        for lo, hi in self.ranges:
            total *= hi - lo + 1
        return total


def box_from_bounds(bounds: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Symmetric box [-b_k, b_k] for each coefficient bound."""
    if any(b < 0 for b in bounds):
        raise ValueError("coefficient bounds must be non-negative")
    return tuple((-b, b) for b in bounds)


def generate_coefficient_shards(
    box: Sequence[tuple[int, int]],
    *,
    shards: int,
) -> list[Shard]:
    """Cut the box along its first coefficient into disjoint shards covering it exactly."""
    if shards <= 0:
        raise ValueError("shards must be positive")
    if not box:
        raise ValueError("box must have at least one coefficient range")
    first, rest = box[0], tuple(box[1:])
    pieces = partition_range(first[0], first[1], shards)
    out = [
        Shard(
            ranges=((lo, hi), *rest),
            shard_id=f"{_SHARD_ID_PREFIX}:{idx}:c1={lo}..{hi}",
        )
        for idx, (lo, hi) in enumerate(pieces)
    ]
    if not out:
        raise ValueError("shard parameters produced no shards")
    return out


def run_sharded(fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    """Apply ``fn`` to every item, preserving input order whatever the worker count."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    started = time.perf_counter()
    if workers == 1 or len(items) <= 1:
        results = [fn(item) for item in items]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(items))) as executor:
            results = list(executor.map(fn, items))
    logger.debug(
        "ran %d shards on %d workers in %.3fs", len(items), workers, time.perf_counter() - started
    )
    return results
