"""Seeded random streams.

Every randomized procedure in bridgecraft takes an explicit ``random.Random``.
Trials that may run concurrently get their own stream derived from a base seed
and a counter, so results never depend on scheduling.
"""

import hashlib
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

Rng = random.Random
T = TypeVar("T")

logger = logging.getLogger("bridgecraft.utils.streams")


def derive_seed(seed: int, *labels: object) -> int:
    """Derive a 64-bit seed from a base seed and a sequence of labels."""
    material = "/".join([str(seed)] + [str(label) for label in labels])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(seed: int, *labels: object) -> Rng:
    """Return an independent stream for ``(seed, *labels)``."""
    return random.Random(derive_seed(seed, *labels))


def run_trials(
    fn: Callable[[int, Rng], T],
    count: int,
    seed: int,
    label: str,
    jobs: int = 1,
) -> List[T]:
    """Run ``fn(i, rng_i)`` for ``i`` in ``range(count)`` and return results in order.

    Args:
        fn: Trial body; receives the trial index and its private stream.
        count: Number of trials.
        seed: Base seed the per-trial streams are derived from.
        label: Distinguishes trial families sharing one base seed.
        jobs: Worker threads. Results are identical for every value.
    """
    def one(i: int) -> T:
        return fn(i, derive_rng(seed, label, i))

    if jobs <= 1 or count <= 1:
        return [one(i) for i in range(count)]

    logger.debug(f"Running {count} trials of {label!r} on {jobs} threads")
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, range(count)))
