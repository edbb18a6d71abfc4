"""One-sided k-junta tester under the uniform distribution.

Used as a subroutine on block restrictions ``f^l`` with ``k = 1``.  The
strategy is blocked relevant-variable hunting: split the domain into ``s``
random blocks, repeatedly compare ``f`` at a uniform point ``x`` and at a copy
of ``x`` with all unmarked blocks rerandomised, and binary-search a new
relevant block whenever the values differ.  A rejection is always backed by
more than ``k`` disjoint blocks, each with a pair of points that differ only
inside the block and get different values, so k-juntas are never rejected.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .blocks import BlockPartition, Queryable, binary_search_block, random_partition
from .boolfn import BooleanFunction, DimensionError
from .reldist import cell_counts, cube

DEFAULT_C = 12
DEFAULT_BLOCK_FACTOR = 8


@dataclass(frozen=True)
class UniformJuntaParams:
    k: int
    eps: Fraction
    delta: Fraction
    c: float = DEFAULT_C
    block_factor: int = DEFAULT_BLOCK_FACTOR

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise ValueError("eps and delta must lie in (0, 1)")
        if self.block_factor < 2:
            raise ValueError("block_factor must be at least 2 (s >= 2k^2)")

    @property
    def s(self) -> int:
        # enough blocks that k+1 relevant variables all land apart except
        # with probability about delta
        spread = math.ceil(Fraction((self.k + 1) * self.k, 2) / self.delta)
        return max(1, self.block_factor * self.k * self.k, spread)

    @property
    def rounds(self) -> int:
        k = max(self.k, 1)
        inner = k / float(self.eps) + k * math.log2(k)
        return math.ceil(self.c * inner * math.log(1 / float(self.delta)))

    @property
    def budget(self) -> int:
        """Worst-case number of membership queries."""
        return 2 * self.rounds + (self.k + 1) * math.ceil(math.log2(self.s))


@dataclass
class UniformJuntaResult:
    accept: bool
    # (block_id, witness) for every relevant block found
    certified: list[tuple[int, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.accept


def uniform_junta_test(
    target: Queryable,
    params: UniformJuntaParams,
    rng: random.Random,
    partition: BlockPartition | None = None,
) -> UniformJuntaResult:
    """Run the tester on ``target`` over its coordinate ``domain``."""
    n, domain = target.n, target.domain
    if partition is None:
        partition = random_partition(n, params.s, rng, domain)
    certified: list[tuple[int, int]] = []
    marked_mask = 0
    for _ in range(params.rounds):
        x = rng.getrandbits(n) & domain
        y = (x & marked_mask) | (rng.getrandbits(n) & domain & ~marked_mask)
        fx, fy = target.mq(x), target.mq(y)
        if fx == fy:
            continue
        l, v = binary_search_block(target, partition, [b for b, _ in certified], x, y, fx, fy)
        certified.append((l, v))
        marked_mask |= partition.mask(l)
        if len(certified) > params.k:
            return UniformJuntaResult(False, certified)
    return UniformJuntaResult(True, certified)


def uniform_distance_to_juntas(f: BooleanFunction, k: int) -> Fraction:
    """Normalised Hamming distance from ``f`` to the nearest k-junta."""
    n = f.n
    if n > 20:
        raise DimensionError("exact uniform distance needs n <= 20")
    if k >= n:
        return Fraction(0)
    c = cube(f.table(), n)
    size = 1 << (n - k)
    best = None
    for J in combinations(range(1, n + 1), k):
        on = cell_counts(c, J)
        d = int(np.minimum(on, size - on).sum())
        if best is None or d < best:
            best = d
    return Fraction(best, 1 << n)
