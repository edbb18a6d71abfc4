"""Relative-error tester for a permutation-closed subclass of k-juntas.

Phases 1 and 2 mirror the junta tester (with ``r = 20k^2`` blocks and a
longer search budget ``T2``).  Phase 3 trims ``Approx(h, κ)`` with satisfying
assignments decoded through :func:`find_var_value`.  Phase 4 draws points of
the chosen approximator via :func:`map_back` and rejects on any that ``f``
does not satisfy.
"""

from __future__ import annotations

import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .blocks import BlockPartition, BlockRestriction, Queryable, binary_search_block, random_partition
from .boolfn import BooleanFunction, JuntaFunction
from .junta_tester import LITERAL_DELTA, LITERAL_EPS, Inequality, ParameterWarning
from .oracle import QueryOracle
from .reldist import PreconditionError, rel_dist, rerandomization_gap
from .subclass_catalog import ApproxSet, SubclassSpec, build_approx, lex_key, table_bits
from .uniform_junta import UniformJuntaParams, uniform_junta_test
from .verdict import (
    ACCEPT,
    ACCEPTED,
    APPROX_EMPTY,
    EMPTY_FUNCTION,
    MIRROR_TEST_REJECT,
    PHASE4_UNSATISFIED,
    REJECT,
    TOO_MANY_BLOCKS,
    UNIFORM_JUNTA_REJECT,
    TesterVerdict,
)


@dataclass(frozen=True)
class SubclassTesterParams:
    spec: SubclassSpec
    eps: Fraction
    c1: float = 10
    c_fv: float = 3
    uj_c: float = 12
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.spec.k < 1:
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
    def k(self) -> int:
        return self.spec.k

    @property
    def class_size(self) -> int:
        return self.spec.count

    @property
    def r(self) -> int:
        return 20 * self.k * self.k

    @property
    def T1(self) -> int:
        return math.ceil(self.c1 * math.log2(max(2, self.class_size)) / float(self.eps))

    @property
    def T2(self) -> int:
        return math.ceil(100 * math.log(20 * self.k + 1)) * self.T1

    @property
    def kappa(self) -> Fraction:
        return Fraction(1, 20 * self.T1)

    @property
    def delta_fv(self) -> Fraction:
        return Fraction(1, 20 * self.k)

    @property
    def fv_rounds(self) -> int:
        return fv_rounds(self.delta_fv, self.c_fv)

    @property
    def phase4_rounds(self) -> int:
        return math.ceil(20 / self.eps)

    @property
    def uj(self) -> UniformJuntaParams:
        return UniformJuntaParams(1, LITERAL_EPS, LITERAL_DELTA, c=self.uj_c)

    def inequalities(self) -> list[Inequality]:
        e, k, C = float(self.eps), self.k, max(2, self.class_size)
        kap = float(self.kappa)
        return [
            Inequality("(1-eps/500)^T1 <= 1/(20|C*|)", (1 - e / 500) ** self.T1, 1 / (20 * C)),
            Inequality("(1-kappa/4)^T2 <= 1/(20k)", (1 - kap / 4) ** self.T2, 1 / (20 * k)),
            Inequality("C(k,2)/r <= 1/20", math.comb(k, 2) / self.r, 1 / 20),
            Inequality("FindVarValue error <= 1/(20k)", fv_error_bound(self.fv_rounds), float(self.delta_fv)),
            Inequality("kappa <= eps/8", kap, e / 8),
        ]

    @property
    def budget(self) -> int:
        """Worst-case queries plus samples of one run."""
        k, R = self.k, self.fv_rounds
        phase1 = 2 * (k + 1) * self.T2 + (k + 1) * math.ceil(math.log2(self.r))
        phase2 = k * (self.uj.budget + 2)
        phase3 = self.T1 * (1 + 2 * k * R)
        phase4 = self.phase4_rounds * (1 + 2 * k * R)
        return phase1 + phase2 + phase3 + phase4

    @property
    def scale(self) -> float:
        """``(k/eps) log2|C(k)*|``, the unit the budget is reported in."""
        return self.k / float(self.eps) * math.log2(max(2, self.class_size))


def fv_rounds(delta: Fraction, c_fv: float = 3) -> int:
    return max(1, math.ceil(c_fv * math.log2(1 / float(delta))))


def fv_error_bound(rounds: int, p_wrong: Fraction = Fraction(1, 15)) -> float:
    """``Pr[Bin(rounds, p_wrong) >= rounds/2]``: the chance that a literal
    1/30-close to the truth loses the vote (each round is wrong with
    probability at most 2/30)."""
    p = float(p_wrong)
    lo = math.ceil(rounds / 2)
    return sum(math.comb(rounds, j) * p**j * (1 - p) ** (rounds - j) for j in range(lo, rounds + 1))


# ---------------------------------------------------------------- subroutines

def find_var_value(psi: Queryable, w: int, rounds: int, rng: random.Random) -> int:
    """Guess ``w_i`` for the literal variable ``i`` of ``psi``.

    ``Y_0`` / ``Y_1`` are the domain coordinates where ``w`` is 0 / 1.  Each
    round flips ``Y_0`` at a random point; a value change votes for 0.
    Returns 0 iff ``G_0 > G_1``.
    """
    domain = psi.domain
    y0 = domain & ~w
    n = psi.n
    g0 = g1 = 0
    for _ in range(rounds):
        b = rng.getrandbits(n) & domain
        if psi.mq(b) != psi.mq(b ^ y0):
            g0 += 1
        else:
            g1 += 1
    return 0 if g0 > g1 else 1


def map_back(
    restrictions: Sequence[Queryable],
    y: int,
    z: int,
    rounds: int,
    rng: random.Random,
) -> int:
    """Flip whole relevant blocks of ``y`` so their literal bits spell ``z``.

    ``restrictions[i]`` is ``f^{l_{i+1}}`` (blocks in increasing id order);
    bit ``i`` of ``z`` is ``z_{i+1}``.
    """
    for i, fl in enumerate(restrictions):
        b = find_var_value(fl, y & fl.domain, rounds, rng)
        if b != (z >> i) & 1:
            y ^= fl.domain
    return y


@lru_cache(maxsize=256)
def cached_approx(spec: SubclassSpec, h: int, kappa: Fraction) -> ApproxSet:
    return build_approx(spec, h, kappa)


def choose_survivor(alive, h: int):
    """Fewest satisfiers, then the lexicographically least table."""
    return min(alive, key=lambda m: (m.ones, lex_key(m.table, h)))


# ---------------------------------------------------------------- tester

def subclass_test(
    oracle: QueryOracle,
    params: SubclassTesterParams,
    partition: BlockPartition | None = None,
) -> TesterVerdict:
    """One run of the subclass tester; all randomness comes from ``oracle.rng``."""
    rng = oracle.rng
    n, k = oracle.n, params.k
    spec = params.spec
    trace: dict = {}

    def verdict(outcome: str, phase: str, reason: str) -> TesterVerdict:
        return TesterVerdict(outcome, phase, reason, oracle.stats(), oracle.seed, trace)

    if not oracle.has_satisfiers:
        return verdict(ACCEPT if spec.contains_constant0 else REJECT, "preflight", EMPTY_FUNCTION)

    # Phase 1
    if partition is None:
        partition = random_partition(n, params.r, rng)
    elif partition.r != params.r or partition.n != n:
        raise ValueError("injected partition does not match (n, r)")
    trace["partition"] = partition
    found: list[int] = []
    witnesses: dict[int, int] = {}
    X = 0
    t = 0
    T2 = params.T2
    sample, mq, getrandbits = oracle.sample, oracle.mq, rng.getrandbits
    while t != T2:
        u = sample()
        t += 1
        b = (u & X) | (getrandbits(n) & ~X)
        if mq(b) != 1:
            l, v = binary_search_block(oracle, partition, found, u, b, 1, 0)
            found.append(l)
            witnesses[l] = v
            X |= partition.mask(l)
            t = 0
            if len(found) > k:
                trace["blocks"] = list(found)
                return verdict(REJECT, "1", TOO_MANY_BLOCKS)
    found.sort()
    trace["blocks"] = list(found)
    trace["witnesses"] = dict(witnesses)
    restrictions = [BlockRestriction(oracle, partition.mask(l), witnesses[l]) for l in found]

    # Phase 2
    for fl in restrictions:
        if not uniform_junta_test(fl, params.uj, rng).accept:
            return verdict(REJECT, "2", UNIFORM_JUNTA_REJECT)
        b = getrandbits(n) & fl.domain
        if fl.mq(b) == fl.mq(b ^ fl.domain):
            return verdict(REJECT, "2", MIRROR_TEST_REJECT)

    # Phase 3
    h = len(found)
    approx = cached_approx(spec, h, params.kappa)
    alive = list(approx.members)
    R = params.fv_rounds
    for _ in range(params.T1):
        u = sample()
        v = 0
        for i, fl in enumerate(restrictions):
            v |= find_var_value(fl, u & fl.domain, R, rng) << i
        alive = [g for g in alive if (g.table >> v) & 1]
    trace["approx_size"] = len(approx)
    trace["survivors"] = [g.table for g in alive]
    if not alive:
        return verdict(REJECT, "3", APPROX_EMPTY)
    chosen = choose_survivor(alive, h)
    trace["chosen"] = chosen.table

    # Phase 4
    sats = [z for z in range(1 << h) if (chosen.table >> z) & 1]
    for _ in range(params.phase4_rounds):
        y = getrandbits(n)
        z = sats[rng.randrange(len(sats))]
        u = map_back(restrictions, y, z, R, rng)
        if mq(u) == 0:
            return verdict(REJECT, "4", PHASE4_UNSATISFIED)
    return verdict(ACCEPT, "4", ACCEPTED)


# ---------------------------------------------------------------- exact laws

def y_sigma_z(y: int, partition: BlockPartition, blocks: Sequence[int], taus: Sequence[int], z: int) -> int:
    """Keep or wholly flip each relevant block so ``y_{τ(l_i)} = z_i``."""
    for i, (l, tau) in enumerate(zip(blocks, taus)):
        if ((y >> (tau - 1)) & 1) != (z >> i) & 1:
            y ^= partition.mask(l)
    return y


def sigma_z_law(n: int, taus: Sequence[int], z: int) -> dict[int, Fraction]:
    """Law of ``σ(z) ∘ w`` with ``w`` uniform off ``S = {τ(l_i)}``."""
    S = 0
    fixed = 0
    for i, tau in enumerate(taus):
        S |= 1 << (tau - 1)
        fixed |= ((z >> i) & 1) << (tau - 1)
    pts = [fixed | w for w in range(1 << n) if w & S == 0]
    return {p: Fraction(1, len(pts)) for p in pts}


def y_sigma_z_law(n, partition, blocks, taus, z) -> dict[int, Fraction]:
    law = Counter(y_sigma_z(y, partition, blocks, taus, z) for y in range(1 << n))
    return {p: Fraction(c, 1 << n) for p, c in law.items()}


def total_variation(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(x, Fraction(0)) - q.get(x, Fraction(0))) for x in keys), Fraction(0)) / 2


def phase4_point_law(
    f: BooleanFunction,
    partition: BlockPartition,
    blocks: Sequence[int],
    witnesses: dict,
    g_table: int,
    rounds: int = 3,
) -> dict[int, Fraction]:
    """Law of the Phase-4 point ``u`` when every ``f^l`` is an exact literal.

    Runs the real :func:`map_back` for every ``y`` and every ``z`` in
    ``g^{-1}(1)``; with exact literals its output does not depend on the
    random stream.
    """
    n = f.n
    h = len(blocks)
    oracle = QueryOracle(f, seed=0)
    rests = [BlockRestriction(oracle, partition.mask(l), witnesses[l]) for l in blocks]
    rng = random.Random(0)
    sats = [z for z in range(1 << h) if (g_table >> z) & 1]
    law: Counter = Counter()
    for y in range(1 << n):
        for z in sats:
            law[map_back(rests, y, z, rounds, rng)] += 1
    total = (1 << n) * len(sats)
    return {p: Fraction(c, total) for p, c in law.items()}


def uniform_law_on(g: BooleanFunction) -> dict[int, Fraction]:
    pts = [x for x in range(1 << g.n) if g(x)]
    return {p: Fraction(1, len(pts)) for p in pts}


def excess_mass(f: BooleanFunction, g_sigma: BooleanFunction) -> Fraction:
    """``|g_σ^{-1}(1) \\ f^{-1}(1)| / |g_σ^{-1}(1)|``."""
    tg, tf = g_sigma.table(), f.table()
    ones = int(tg.sum())
    return Fraction(int(((tg == 1) & (tf == 0)).sum()), ones)


def missed_mass(f: BooleanFunction, g_sigma: BooleanFunction) -> Fraction:
    """``Pr_{u ~ f^{-1}(1)}[g_σ(u) = 0]``."""
    tg, tf = g_sigma.table(), f.table()
    return Fraction(int(((tf == 1) & (tg == 0)).sum()), int(tf.sum()))


def phase4_reject_probability(f: BooleanFunction, g_sigma: BooleanFunction, eps: Fraction) -> Fraction:
    """Exact rejection probability of Phase 4 when its points are uniform on
    ``g_σ^{-1}(1)``."""
    q = excess_mass(f, g_sigma)
    return 1 - (1 - q) ** math.ceil(20 / Fraction(eps))


def relevant_variables(f: BooleanFunction) -> list[int]:
    t = f.table()
    n = f.n
    out = []
    idx = list(range(1 << n))
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        if any(t[x] != t[x ^ bit] for x in idx):
            out.append(i)
    return out


def defining_g(f: BooleanFunction, sigma: Sequence[int]) -> int:
    """``G(z) = argmax_b Pr_w[f(σ(z) ∘ w) = b]`` with ties to 0, as a table."""
    n, h = f.n, len(sigma)
    t = f.table()
    S = 0
    for s in sigma:
        S |= 1 << (s - 1)
    free_pts = [w for w in range(1 << n) if w & S == 0]
    g = 0
    for z in range(1 << h):
        fixed = 0
        for i, s in enumerate(sigma):
            fixed |= ((z >> i) & 1) << (s - 1)
        ones = sum(int(t[fixed | w]) for w in free_pts)
        if 2 * ones > len(free_pts):
            g |= 1 << z
    return g


@dataclass(frozen=True)
class AppleResult:
    premise: bool
    dist: Fraction
    gap: Fraction
    kappa: Fraction

    @property
    def holds(self) -> bool:
        return (not self.premise) or self.gap > self.kappa / 4


def apple_check(f: BooleanFunction, partition: BlockPartition, blocks: Sequence[int], kappa: Fraction) -> AppleResult:
    """If ``rel-dist(f, G_σ) > κ`` then ``Pr[f(u_X ∘ w) = 0] > κ/4``.

    ``f`` must be a junta whose relevant variables fall in distinct
    partition blocks, and each listed block must hold one of them.
    """
    kappa = Fraction(kappa)
    J = relevant_variables(f)
    per_block = Counter(partition.block_of(j) for j in J)
    if any(c > 1 for c in per_block.values()):
        raise PreconditionError("a block holds two relevant variables")
    blocks = sorted(blocks)
    sigma = []
    for l in blocks:
        inside = [j for j in J if partition.block_of(j) == l]
        if len(inside) != 1:
            raise PreconditionError(f"block {l} holds no relevant variable")
        sigma.append(inside[0])
    G = defining_g(f, sigma)
    G_sigma = JuntaFunction(f.n, sigma, table_bits(G, len(sigma)))
    d = rel_dist(f, G_sigma).value
    X = partition.union(blocks)
    gap = rerandomization_gap(f, X)
    return AppleResult(d > kappa, d, gap, kappa)
