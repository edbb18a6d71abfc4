"""Permutation-closed subclasses of k-juntas and the ``Approx(h, κ)`` sets.

Core functions over variables ``1..k`` are handled as Python ints holding a
``2^k``-entry truth table (bit ``x`` is the value at ``x``).

Supported classes:

``juntas``  every function of ``x_1..x_k`` (contains constant-0)
``dt``      decision trees with at most ``k`` leaves (contains constant-0)
``conj``    conjunctions of literals on distinct variables, the empty one
            being constant-1 (no constant-0)
``parity``  XORs of nonempty variable subsets, plus constant-1 standing in
            for the empty parity (no constant-0)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .boolfn import BooleanFunction, JuntaFunction, TruthTable
from .fileformat import table_to_hex
from .reldist import PreconditionError, RelDist, rel_dist, rel_dist_to_core_class

ALIASES = {
    "dt": "dt",
    "size-k-decision-trees": "dt",
    "decision-trees": "dt",
    "juntas": "juntas",
    "all-k-juntas": "juntas",
    "junta": "juntas",
    "conj": "conj",
    "conjunctions": "conj",
    "conjunctions-<=k": "conj",
    "parity": "parity",
    "parities": "parity",
    "parities-<=k": "parity",
}

MAX_K = {"dt": 4, "juntas": 4, "conj": 10, "parity": 10}


def var_mask(k: int, i: int) -> int:
    """Table (as int) of the literal ``x_i`` over ``k`` variables."""
    m = 0
    for x in range(1 << k):
        if (x >> (i - 1)) & 1:
            m |= 1 << x
    return m


def popcount(t: int) -> int:
    return bin(t).count("1")


def table_bits(t: int, k: int) -> np.ndarray:
    return np.array([(t >> x) & 1 for x in range(1 << k)], dtype=np.uint8)


def bits_to_table(bits) -> int:
    t = 0
    for x, b in enumerate(bits):
        if b:
            t |= 1 << x
    return t


def lex_key(t: int, k: int) -> tuple[int, ...]:
    """Lexicographic key on ``(g(0), g(1), ..., g(2^k - 1))``."""
    return tuple((t >> x) & 1 for x in range(1 << k))


def permute_table(t: int, k: int, pi: Sequence[int]) -> int:
    """Table of ``g_π`` with ``g_π(x) = g(π(x))`` and ``π(x)_i = x_{π(i)}``."""
    out = 0
    for x in range(1 << k):
        y = 0
        for i, p in enumerate(pi):
            y |= ((x >> (p - 1)) & 1) << i
        if (t >> y) & 1:
            out |= 1 << x
    return out


# ---------------------------------------------------------------- enumerations

@lru_cache(maxsize=None)
def _trees_exact(k: int, leaves: int, avail: frozenset) -> frozenset:
    """Tables of trees with exactly ``leaves`` leaves over variables ``avail``."""
    full = (1 << (1 << k)) - 1
    if leaves == 1:
        return frozenset((0, full))
    out = set()
    for v in avail:
        mv = var_mask(k, v)
        rest = avail - {v}
        for left in range(1, leaves):
            for lo in _trees_exact(k, left, rest):
                for hi in _trees_exact(k, leaves - left, rest):
                    out.add((lo & ~mv) | (hi & mv))
    return frozenset(out)


def _enum_dt(k: int) -> list[int]:
    avail = frozenset(range(1, k + 1))
    tables = set()
    for leaves in range(1, max(k, 1) + 1):
        tables |= _trees_exact(k, leaves, avail)
    return sorted(tables)


def _enum_juntas(k: int) -> list[int]:
    return list(range(1 << (1 << k)))


def _enum_conj(k: int) -> list[int]:
    full = (1 << (1 << k)) - 1
    tables = set()
    for signs in product((None, 0, 1), repeat=k):
        t = full
        for i, s in enumerate(signs, start=1):
            if s is None:
                continue
            mv = var_mask(k, i)
            t &= mv if s else (full & ~mv)
        tables.add(t)
    return sorted(tables)


def _enum_parity(k: int) -> list[int]:
    full = (1 << (1 << k)) - 1
    tables = {full}
    for size in range(1, k + 1):
        for S in combinations(range(1, k + 1), size):
            t = 0
            for x in range(1 << k):
                if sum((x >> (i - 1)) & 1 for i in S) & 1:
                    t |= 1 << x
            tables.add(t)
    return sorted(tables)


_ENUMERATORS = {"dt": _enum_dt, "juntas": _enum_juntas, "conj": _enum_conj, "parity": _enum_parity}


@dataclass(frozen=True)
class SubclassSpec:
    name: str
    k: int

    def __post_init__(self):
        canon = ALIASES.get(self.name)
        if canon is None:
            raise ValueError(f"unknown class {self.name!r}; choose from dt, juntas, conj, parity")
        object.__setattr__(self, "name", canon)
        if self.k < 0 or self.k > MAX_K[canon]:
            raise ValueError(f"class {canon} supports 0 <= k <= {MAX_K[canon]}, got {self.k}")

    @property
    def contains_constant0(self) -> bool:
        return self.name in ("dt", "juntas")

    def enumerate_core(self) -> Iterator[int]:
        """Duplicate-free stream of ``C(k)*`` tables (ints over 2^k entries)."""
        yield from self._tables()

    def _tables(self) -> tuple[int, ...]:
        return _cached_tables(self.name, self.k)

    @property
    def count(self) -> int:
        return len(self._tables())

    def contains(self, table: int) -> bool:
        return table in _cached_table_set(self.name, self.k)

    def core_arrays(self) -> list[np.ndarray]:
        return [table_bits(t, self.k) for t in self._tables()]

    def functions(self, n: int) -> Iterator[JuntaFunction]:
        """Every member of ``C(k)`` on ``n`` variables (with repeats)."""
        from .reldist import placements

        for sigma in placements(n, self.k):
            for t in self._tables():
                yield JuntaFunction(n, sigma, table_bits(t, self.k))

    def distance(self, f: BooleanFunction) -> tuple[RelDist, JuntaFunction]:
        """Exact ``rel-dist(f, C(k))`` and a closest member."""
        return rel_dist_to_core_class(f, self.k, self.core_arrays())


@lru_cache(maxsize=None)
def _cached_tables(name: str, k: int) -> tuple[int, ...]:
    return tuple(_ENUMERATORS[name](k))


@lru_cache(maxsize=None)
def _cached_table_set(name: str, k: int) -> frozenset:
    return frozenset(_cached_tables(name, k))


# ---------------------------------------------------------------- Approx

@dataclass(frozen=True)
class ApproxMember:
    table: int
    ones: int


@dataclass(frozen=True)
class ApproxSet:
    h: int
    kappa: Fraction
    members: tuple[ApproxMember, ...]

    def __len__(self) -> int:
        return len(self.members)

    def tables(self) -> list[int]:
        return [m.table for m in self.members]

    def dump(self) -> str:
        lines = [f"# h={self.h} kappa={self.kappa} members={len(self.members)}"]
        for m in self.members:
            lines.append(f"{table_to_hex(table_bits(m.table, self.h))} {m.ones}")
        return "\n".join(lines) + "\n"


def project_majority(t: int, k: int, h: int) -> tuple[int, int]:
    """Majority projection of ``t`` onto variables ``1..h`` (ties to 0).

    Returns ``(g, mismatches)`` where ``mismatches`` counts points of the
    k-cube on which ``t`` and the lifted ``g`` differ.
    """
    if not 0 <= h <= k:
        raise ValueError(f"need 0 <= h <= k, got h={h}, k={k}")
    free = 1 << (k - h)
    g = 0
    mism = 0
    for z in range(1 << h):
        c = sum((t >> (z | (w << h))) & 1 for w in range(free))
        if 2 * c > free:
            g |= 1 << z
            mism += free - c
        else:
            mism += c
    return g, mism


def build_approx(spec: SubclassSpec, h: int, kappa: Fraction) -> ApproxSet:
    """``Approx(h, κ)`` for the class; candidates with no satisfiers are skipped."""
    kappa = Fraction(kappa)
    k = spec.k
    seen: dict[int, ApproxMember] = {}
    for t in spec.enumerate_core():
        ones = popcount(t)
        if ones == 0:
            continue
        g, mism = project_majority(t, k, h)
        if Fraction(mism, ones) <= kappa and g not in seen:
            seen[g] = ApproxMember(g, popcount(g))
    members = sorted(seen.values(), key=lambda m: lex_key(m.table, h))
    return ApproxSet(h, kappa, tuple(members))


def simple2_check(
    f: BooleanFunction,
    spec: SubclassSpec,
    approx: ApproxSet,
    g: int,
    sigma: Sequence[int],
) -> bool:
    """``rel-dist(f, C(k)) <= rel-dist(f, g_σ) + 4κ`` for ``g`` in ``Approx``."""
    if g not in approx.tables():
        raise PreconditionError("g is not a member of the Approx set")
    g_sigma = JuntaFunction(f.n, sigma, table_bits(g, approx.h))
    d_g = rel_dist(f, g_sigma).value
    if d_g > 1:
        raise PreconditionError("rel-dist(f, g_sigma) exceeds 1")
    d_class = spec.distance(f)[0].value
    return d_class <= d_g + 4 * approx.kappa


def member_function(spec: SubclassSpec, table: int, n: int, sigma: Sequence[int]) -> JuntaFunction:
    return JuntaFunction(n, sigma, table_bits(table, spec.k))


def as_truth_table(t: int, k: int) -> TruthTable:
    return TruthTable(k, table_bits(t, k))
