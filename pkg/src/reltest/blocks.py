"""Random block partitions of the variables and binary search over blocks."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .boolfn import full_mask, indices_of


class Queryable(Protocol):
    """Anything with a counted membership query over a coordinate domain."""

    n: int
    domain: int

    def mq(self, x: int) -> int: ...


class ContractViolation(ValueError):
    """The caller broke a documented precondition."""


@dataclass(frozen=True)
class BlockPartition:
    """Partition of ``[n]`` into ``r`` blocks with 1-based block ids.

    ``assignment[i-1]`` is the block of variable ``i`` (0 if the variable is
    outside the partitioned domain).  ``masks[l-1]`` is the bit mask of
    block ``l``.  Blocks may be empty.
    """

    n: int
    r: int
    assignment: tuple[int, ...]
    masks: tuple[int, ...]

    @classmethod
    def from_assignment(cls, n: int, r: int, assignment: Sequence[int]) -> "BlockPartition":
        if len(assignment) != n:
            raise ValueError(f"assignment has {len(assignment)} entries, expected {n}")
        masks = [0] * r
        for i, b in enumerate(assignment):
            if b == 0:
                continue
            if not 1 <= b <= r:
                raise ValueError(f"block id {b} outside [1, {r}]")
            masks[b - 1] |= 1 << i
        return cls(n, r, tuple(int(b) for b in assignment), tuple(masks))

    @classmethod
    def from_blocks(cls, n: int, blocks: Sequence[Iterable[int]]) -> "BlockPartition":
        """Build from explicit 1-based index sets; uncovered variables get id 0."""
        assignment = [0] * n
        for l, blk in enumerate(blocks, start=1):
            for i in blk:
                if assignment[i - 1]:
                    raise ValueError(f"variable {i} appears in two blocks")
                assignment[i - 1] = l
        return cls.from_assignment(n, len(blocks), assignment)

    def mask(self, block_id: int) -> int:
        return self.masks[block_id - 1]

    def block(self, block_id: int) -> list[int]:
        return indices_of(self.masks[block_id - 1])

    def block_of(self, var: int) -> int:
        return self.assignment[var - 1]

    def union(self, block_ids: Iterable[int]) -> int:
        m = 0
        for l in block_ids:
            m |= self.masks[l - 1]
        return m

    @property
    def domain(self) -> int:
        m = 0
        for b in self.masks:
            m |= b
        return m


def random_partition(n: int, r: int, rng: random.Random, domain: int | None = None) -> BlockPartition:
    """Send every variable of ``domain`` (default ``[n]``) to an independent
    uniform block in ``[r]``."""
    if r < 1:
        raise ValueError("need at least one block")
    if domain is None:
        domain = full_mask(n)
    assignment = [0] * n
    for i in indices_of(domain):
        assignment[i - 1] = rng.randrange(r) + 1
    return BlockPartition.from_assignment(n, r, assignment)


def binary_search_block(
    target: Queryable,
    partition: BlockPartition,
    excluded: Iterable[int],
    a: int,
    b: int,
    fa: int,
    fb: int,
) -> tuple[int, int]:
    """Locate a block that by itself changes the value of ``target``.

    ``a`` and ``b`` must have different values (``fa != fb``) and agree on
    every excluded block.  Candidate blocks are the non-excluded blocks on
    which they differ, kept in block-id order.  Each step moves ``b``'s
    content on the first half of the candidates into ``a`` and keeps the half
    that still flips the value.

    Returns ``(l, v)`` with ``target(v) != target(v`` with block ``l`` taken
    from ``b)``; ``v`` is the final ``a`` endpoint.  Makes exactly
    ``ceil(log2 |R|)`` queries, ``R`` the candidate list.
    """
    if fa == fb:
        raise ContractViolation("binary search needs endpoints with different values")
    excluded = set(excluded)
    diff = a ^ b
    if diff & partition.union(excluded):
        raise ContractViolation("endpoints differ on an excluded block")
    cand = [l for l in range(1, partition.r + 1)
            if l not in excluded and diff & partition.masks[l - 1]]
    if not cand:
        raise ContractViolation("endpoints differ outside the partitioned domain")
    while len(cand) > 1:
        half = cand[: len(cand) // 2]
        y = partition.union(half)
        c = (a & ~y) | (b & y)
        if target.mq(c) != fa:
            b = c
            cand = half
        else:
            a = c
            cand = cand[len(cand) // 2:]
    return cand[0], a


class BlockRestriction:
    """``f^l(x) = f(v_{outside X_l} ∘ x_{X_l})``, queried through the parent.

    Inputs are n-bit ints; only the bits inside the block are read.
    """

    def __init__(self, parent: Queryable, mask: int, witness: int):
        self.parent = parent
        self.n = parent.n
        self.domain = mask
        self.witness = witness
        self._base = witness & ~mask

    def mq(self, x: int) -> int:
        return self.parent.mq(self._base | (x & self.domain))

    def __call__(self, x: int) -> int:
        return self.mq(x)
