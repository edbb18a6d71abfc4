"""Relative-error k-junta tester (Phases A to D).

Phase A draws a random partition into ``r = 2k^2`` blocks.  Phase B hunts for
relevant blocks by rerandomising everything outside the blocks found so far.
Phase C checks that every restriction ``f^l`` looks like a literal.  Phase D
uses the literals to build a flip pattern ``z`` and compares ``f`` at
``u_X ∘ w`` and ``(u_X ⊕ z_X) ∘ w``.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .blocks import BlockPartition, BlockRestriction, binary_search_block, random_partition
from .oracle import QueryOracle
from .uniform_junta import UniformJuntaParams, uniform_junta_test
from .verdict import (
    ACCEPT,
    ACCEPTED,
    COUNTER_MISMATCH,
    EMPTY_FUNCTION,
    FINAL_DISAGREEMENT,
    MIRROR_TEST_REJECT,
    REJECT,
    TOO_MANY_BLOCKS,
    UNIFORM_JUNTA_REJECT,
    TesterVerdict,
)

# parameters of the literal check run on every f^l
LITERAL_EPS = Fraction(1, 30)
LITERAL_DELTA = Fraction(1, 15)


class ParameterWarning(UserWarning):
    """A configured constant does not meet one of the analysis inequalities."""


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


@dataclass(frozen=True)
class JuntaTesterParams:
    k: int
    eps: Fraction
    c_T: float = 6
    c_M: float = 24
    c_h: float = 8
    uj_c: float = 12
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 < self.eps < Fraction(1, 2):
            raise ValueError("eps must lie in (0, 1/2)")
        bad = [q for q in self.inequalities() if not q.holds]
        if bad:
            msg = "; ".join(f"{q.name}: {q.lhs:.4g} > {q.rhs:.4g}" for q in bad)
            if self.strict:
                raise ValueError(f"analysis inequalities fail: {msg}")
            warnings.warn(msg, ParameterWarning, stacklevel=3)

    @property
    def log_ratio(self) -> float:
        return math.log2(self.k / float(self.eps))

    @property
    def r(self) -> int:
        return 2 * self.k * self.k

    @property
    def T(self) -> int:
        return max(1, math.ceil(self.c_T * self.log_ratio))

    @property
    def M(self) -> int:
        return max(1, math.ceil(self.c_M / float(self.eps)))

    @property
    def h(self) -> int:
        return max(1, math.ceil(self.c_h * self.log_ratio))

    @property
    def uj(self) -> UniformJuntaParams:
        return UniformJuntaParams(1, LITERAL_EPS, LITERAL_DELTA, c=self.uj_c)

    def inequalities(self) -> list[Inequality]:
        e, k = float(self.eps), self.k
        return [
            Inequality("(1-eps/20)^T <= 1/(15k)", (1 - e / 20) ** self.T, 1 / (15 * k)),
            Inequality("M k (1/15)^h <= 1/15", self.M * k * (1 / 15) ** self.h, 1 / 15),
            Inequality("(1-eps/5)^M <= 1/15", (1 - e / 5) ** self.M, 1 / 15),
        ]

    @property
    def budget(self) -> int:
        """Worst-case queries plus samples of one run."""
        k = self.k
        phase_b = 2 * (k + 1) * self.T + (k + 1) * math.ceil(math.log2(self.r))
        phase_c = k * (self.uj.budget + 2)
        phase_d = self.M * (3 * k * self.h + 3)
        return phase_b + phase_c + phase_d

    @property
    def scale(self) -> float:
        """``(k/eps) log2(k/eps)``, the unit the budget is reported in."""
        return self.k / float(self.eps) * self.log_ratio

    @classmethod
    def calibrated(cls, k: int, eps: Fraction, **kw) -> "JuntaTesterParams":
        """Smallest T, M, h for which every listed inequality holds."""
        e = float(Fraction(eps))
        lr = math.log2(k / e)
        T = math.ceil(math.log(15 * k) / -math.log1p(-e / 20))
        M = math.ceil(math.log(15) / -math.log1p(-e / 5))
        h = math.ceil(math.log(15 * M * k) / math.log(15))
        # back out constants so that the ceilings reproduce T, M, h
        return cls(k, eps, c_T=T / lr, c_M=M * e, c_h=h / lr, **kw)


def literal_counters(fl, block: int, s: int, h: int, rng: random.Random) -> tuple[int, int]:
    """The ``h`` paired flip rounds of Phase D on one restriction.

    ``Y_0`` holds the block coordinates where ``s`` is 0, ``Y_1`` the rest.
    Returns ``(G_0, G_1)``.
    """
    y0 = block & ~s
    y1 = block & s
    n = fl.n
    g0 = g1 = 0
    for _ in range(h):
        b = rng.getrandbits(n) & block
        fb = fl.mq(b)
        if fl.mq(b ^ y0) != fb:
            g0 += 1
        if fl.mq(b ^ y1) != fb:
            g1 += 1
    return g0, g1


def flip_pattern(g0: int, g1: int, h: int, block: int, s: int) -> int | None:
    """``z`` restricted to the block, or ``None`` if the counters are not
    ``{0, h}``."""
    if {g0, g1} != {0, h}:
        return None
    return (s & block) if g0 == h else (~s & block)


def junta_test(
    oracle: QueryOracle,
    params: JuntaTesterParams,
    partition: BlockPartition | None = None,
) -> TesterVerdict:
    """One run of the tester; all randomness comes from ``oracle.rng``."""
    rng = oracle.rng
    n, k = oracle.n, params.k
    trace: dict = {}

    def verdict(outcome: str, phase: str, reason: str) -> TesterVerdict:
        return TesterVerdict(outcome, phase, reason, oracle.stats(), oracle.seed, trace)

    if not oracle.has_satisfiers:
        # constant-0 is a 0-junta
        return verdict(ACCEPT, "preflight", EMPTY_FUNCTION)

    # Phase A
    if partition is None:
        partition = random_partition(n, params.r, rng)
    elif partition.r != params.r or partition.n != n:
        raise ValueError("injected partition does not match (n, r)")
    trace["partition"] = partition

    # Phase B
    found: list[int] = []
    witnesses: dict[int, int] = {}
    X = 0
    t = 0
    while t != params.T:
        u = oracle.sample()
        w = rng.getrandbits(n) & ~X
        t += 1
        b = (u & X) | w
        # f(u) = 1 is known from the sampler
        if oracle.mq(b) != 1:
            l, v = binary_search_block(oracle, partition, found, u, b, 1, 0)
            found.append(l)
            witnesses[l] = v
            X |= partition.mask(l)
            t = 0
            if len(found) > k:
                trace["blocks"] = list(found)
                return verdict(REJECT, "B", TOO_MANY_BLOCKS)
    found.sort()
    trace["blocks"] = list(found)
    trace["witnesses"] = dict(witnesses)

    # Phase C
    restrictions = {l: BlockRestriction(oracle, partition.mask(l), witnesses[l]) for l in found}
    uj = params.uj
    for l in found:
        fl = restrictions[l]
        if not uniform_junta_test(fl, uj, rng).accept:
            return verdict(REJECT, "C", UNIFORM_JUNTA_REJECT)
        blk = partition.mask(l)
        b = rng.getrandbits(n) & blk
        if fl.mq(b) == fl.mq(b ^ blk):
            return verdict(REJECT, "C", MIRROR_TEST_REJECT)

    # Phase D
    for _ in range(params.M):
        s = rng.getrandbits(n) & X
        z = 0
        for l in found:
            blk = partition.mask(l)
            g0, g1 = literal_counters(restrictions[l], blk, s, params.h, rng)
            zl = flip_pattern(g0, g1, params.h, blk, s)
            if zl is None:
                return verdict(REJECT, "D", COUNTER_MISMATCH)
            z |= zl
        u = oracle.sample()
        w = rng.getrandbits(n) & ~X
        p = (u & X) | w
        if oracle.mq(p) != oracle.mq(p ^ z):
            return verdict(REJECT, "D", FINAL_DISAGREEMENT)
    return verdict(ACCEPT, "D", ACCEPTED)


# ---------------------------------------------------------------- exact laws

def phase_d_pair_law(f, partition: BlockPartition, blocks: Sequence[int], witnesses: dict, h: int = 2):
    """Exact law of ``(u_X ∘ w, (u_X ⊕ z_X) ∘ w)`` in one Phase-D round.

    Assumes every ``f^l`` is an exact literal, so the counters and hence
    ``z`` are a deterministic function of ``s``; this is asserted.  Returns
    ``{(p, q): Fraction}``.
    """
    from collections import Counter

    n = f.n
    X = partition.union(blocks)
    sats = [x for x in range(1 << n) if f(x)]
    dummy = QueryOracle(f, seed=0)
    rests = {l: BlockRestriction(dummy, partition.mask(l), witnesses[l]) for l in blocks}
    rng = random.Random(0)
    zs = []
    for s in _subsets(X):
        z = 0
        for l in blocks:
            blk = partition.mask(l)
            g0, g1 = literal_counters(rests[l], blk, s, h, rng)
            zl = flip_pattern(g0, g1, h, blk, s)
            if zl is None:
                raise AssertionError("counters left {0, h} on an exact literal")
            z |= zl
        zs.append(z)
    law: Counter = Counter()
    outside = list(_subsets(((1 << n) - 1) & ~X))
    for u in sats:
        for w in outside:
            p = (u & X) | w
            for z in zs:
                law[(p, p ^ z)] += 1
    total = len(sats) * len(outside) * len(zs)
    return {key: Fraction(c, total) for key, c in law.items()}


def rerandomized_pair_law(f, X: int, J: int):
    """Exact law of ``(u_X ∘ w, u_J ∘ y ∘ w)``."""
    from collections import Counter

    n = f.n
    sats = [x for x in range(1 << n) if f(x)]
    outside = list(_subsets(((1 << n) - 1) & ~X))
    inner = list(_subsets(X & ~J))
    law: Counter = Counter()
    for u in sats:
        for w in outside:
            p = (u & X) | w
            for y in inner:
                law[(p, (u & J) | y | w)] += 1
    total = len(sats) * len(outside) * len(inner)
    return {key: Fraction(c, total) for key, c in law.items()}


def wrong_round_probability(table: Sequence[int], m: int, tau: int, s: int) -> Fraction:
    """Exact probability that one Phase-D round pushes ``z_tau`` to 1.

    ``table`` is ``f^l`` on a local m-bit cube, ``tau`` the 0-based position
    of its literal variable and ``s`` a local m-bit mask.  With ``tau`` in
    ``Y_0`` the round is wrong when ``G_0`` stays put while ``G_1`` grows;
    symmetrically for ``tau`` in ``Y_1``.  The whole inner loop goes wrong
    with probability equal to this value to the power ``h``.
    """
    full = (1 << m) - 1
    y0, y1 = full & ~s, full & s
    right, other = (y1, y0) if (s >> tau) & 1 else (y0, y1)
    bad = 0
    for b in range(1 << m):
        fb = table[b]
        if table[b ^ right] == fb and table[b ^ other] != fb:
            bad += 1
    return Fraction(bad, 1 << m)


def _subsets(mask: int):
    """All sub-masks of ``mask`` (including 0)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask
