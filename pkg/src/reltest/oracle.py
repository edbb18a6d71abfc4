"""Relative-error access to a Boolean function.

A :class:`QueryOracle` answers membership queries ``MQ(f)`` and draws
uniform samples from ``f^{-1}(1)``.  Both kinds of call are counted.  The
oracle also owns the trial's random stream, so a single integer seed
determines an entire tester run.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boolfn import (
    BooleanFunction,
    DecisionTree,
    DimensionError,
    JuntaFunction,
    MAX_DENSE_N,
    full_mask,
)


class EmptyFunction(ValueError):
    """Raised when a satisfying assignment is requested from constant-0."""


@dataclass(frozen=True)
class QueryStats:
    mq: int
    samp: int

    @property
    def total(self) -> int:
        return self.mq + self.samp

    def as_dict(self) -> dict:
        return {"mq": self.mq, "samp": self.samp, "total": self.total}


def make_sampler(f: BooleanFunction) -> tuple[int, Callable[[random.Random], int]]:
    """Return ``(|f^{-1}(1)|, draw)`` where ``draw(rng)`` is a uniform satisfier."""
    n = f.n
    if isinstance(f, JuntaFunction):
        core_sats = [int(c) for c in np.flatnonzero(f.core.table())]
        patterns = [f.scatter(c) for c in core_sats]
        free = full_mask(n) & ~f.support_mask
        count = len(patterns) << (n - f.h)

        def draw_junta(rng: random.Random) -> int:
            return patterns[rng.randrange(len(patterns))] | (rng.getrandbits(n) & free)

        return count, draw_junta

    if isinstance(f, DecisionTree):
        ones = [(d, fm, fb) for v, d, fm, fb in f.leaves() if v]
        if not ones:
            return 0, _no_draw
        depth = max(d for d, _, _ in ones)
        cum = []
        acc = 0
        for d, _, _ in ones:
            # weight proportional to 2^(-depth)
            acc += 1 << (depth - d)
            cum.append(acc)
        count = sum(1 << (n - d) for d, _, _ in ones)
        mask_n = full_mask(n)

        def draw_tree(rng: random.Random) -> int:
            i = bisect.bisect_right(cum, rng.randrange(acc))
            _, fm, fb = ones[i]
            return fb | (rng.getrandbits(n) & mask_n & ~fm)

        return count, draw_tree

    if n > MAX_DENSE_N:
        raise DimensionError(f"no sampler for a {type(f).__name__} with n={n}")
    sats = np.flatnonzero(f.table())
    count = int(sats.shape[0])
    if n <= 20:
        sat_list = sats.tolist()

        def draw_list(rng: random.Random) -> int:
            return sat_list[rng.randrange(count)]

        return count, draw_list

    def draw_array(rng: random.Random) -> int:
        return int(sats[rng.randrange(count)])

    return count, draw_array


def _no_draw(rng: random.Random) -> int:  # pragma: no cover - guarded by caller
    raise EmptyFunction("f^{-1}(1) is empty")


class QueryOracle:
    """Counting oracle around ``f`` with its own seeded random stream.

    Not thread-safe: use one oracle per trial.
    """

    def __init__(self, f: BooleanFunction, seed: int | None = None, rng: random.Random | None = None):
        self.f = f
        self.n = f.n
        self.domain = full_mask(f.n)
        self.seed = seed
        self.rng = rng if rng is not None else random.Random(seed)
        self.mq_count = 0
        self.samp_count = 0
        self._eval = f.fast
        self._sampler: Callable[[random.Random], int] | None = None
        self._ones: int | None = None

    def _prepare(self) -> None:
        if self._sampler is None:
            self._ones, self._sampler = make_sampler(self.f)

    @property
    def satisfier_count(self) -> int:
        self._prepare()
        return self._ones

    @property
    def has_satisfiers(self) -> bool:
        """Free structural check used by the testers' constant-0 preflight."""
        return self.satisfier_count > 0

    def mq(self, x: int) -> int:
        if x < 0 or x >> self.n:
            raise DimensionError(f"assignment {x} does not fit in {self.n} bits")
        self.mq_count += 1
        return self._eval(x)

    def sample(self) -> int:
        self._prepare()
        if not self._ones:
            raise EmptyFunction("cannot sample from f^{-1}(1): f is identically 0")
        self.samp_count += 1
        return self._sampler(self.rng)

    def random_bits(self, mask: int) -> int:
        """Uniform random assignment to the coordinates in ``mask`` (others 0)."""
        return self.rng.getrandbits(self.n) & mask

    def stats(self) -> QueryStats:
        return QueryStats(self.mq_count, self.samp_count)
