"""Exact relative distances and brute-force checks of the lemmas about them.

Everything here returns :class:`fractions.Fraction` values computed by full
enumeration.  The heavy lifting is done with numpy on the "cube view" of a
truth table: an array of shape ``(2,) * n`` whose axis ``j`` is ``x_{j+1}``.
Summing over all other axes gives per-cell satisfier counts for any set of
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .boolfn import (
    BooleanFunction,
    DimensionError,
    JuntaFunction,
    MAX_DENSE_N,
    TruthTable,
)
from .oracle import EmptyFunction


class PreconditionError(ValueError):
    """A lemma check was called on inputs outside the lemma's hypothesis."""


@dataclass(frozen=True, order=False)
class RelDist:
    """``|f^{-1}(1) △ g^{-1}(1)| / |f^{-1}(1)|`` kept as an integer pair."""

    sym_diff: int
    f_ones: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.sym_diff, self.f_ones)

    def __float__(self) -> float:
        return self.sym_diff / self.f_ones

    def __str__(self) -> str:
        return str(self.value)


# ---------------------------------------------------------------- cube helpers

def cube(table: np.ndarray, n: int) -> np.ndarray:
    """View a length-``2**n`` table as an n-axis array, axis j <-> x_{j+1}."""
    return np.asarray(table).reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))


def cell_counts(c: np.ndarray, coords: Sequence[int]) -> np.ndarray:
    """Satisfier counts per setting of ``coords`` (1-based, ordered).

    Entry ``Σ_i x_{coords[i]} 2^i`` of the result counts the points of the
    cube with those coordinate values and ``f = 1``.
    """
    n = c.ndim
    axes = [j - 1 for j in coords]
    if len(set(axes)) != len(axes) or any(a < 0 or a >= n for a in axes):
        raise DimensionError(f"bad coordinate list {list(coords)} for n={n}")
    others = tuple(a for a in range(n) if a not in axes)
    s = c.sum(axis=others, dtype=np.int64) if others else c.astype(np.int64)
    # s has the kept axes in increasing order; put coords[0] last so it is
    # the least significant position after C-order flattening.
    kept = sorted(axes)
    order = [kept.index(a) for a in reversed(axes)]
    return s.transpose(order).reshape(-1)


def _dense(f: BooleanFunction) -> np.ndarray:
    if f.n > MAX_DENSE_N:
        raise DimensionError(f"n={f.n} is too large for exact enumeration")
    return f.table()


def _require_ones(f: BooleanFunction) -> int:
    ones = f.count_ones()
    if ones == 0:
        raise EmptyFunction("relative distance from an identically-0 function is undefined")
    return ones


def _as_indices(s: Iterable[int] | int, n: int) -> list[int]:
    if isinstance(s, int):
        return [i + 1 for i in range(n) if (s >> i) & 1]
    out = sorted(set(int(i) for i in s))
    if out and (out[0] < 1 or out[-1] > n):
        raise DimensionError(f"index set {out} not inside [1, {n}]")
    return out


# ---------------------------------------------------------------- distances

def _project(f: JuntaFunction, union: Sequence[int]) -> np.ndarray:
    """Table of a junta over the cube of the coordinates in ``union``."""
    pos = {v: i for i, v in enumerate(union)}
    pts = np.arange(1 << len(union), dtype=np.int64)
    idx = np.zeros_like(pts)
    for i, v in enumerate(f.variables):
        idx |= ((pts >> pos[v]) & 1) << i
    return f.core.table()[idx]


def rel_dist(f: BooleanFunction, g: BooleanFunction) -> RelDist:
    """Exact ``rel-dist(f, g)``.

    Two junta-lifted functions are compared on the cube of their joint
    support, with each cell weighted by ``2^(n - |support|)``.
    """
    if f.n != g.n:
        raise DimensionError(f"n mismatch: {f.n} vs {g.n}")
    if isinstance(f, JuntaFunction) and isinstance(g, JuntaFunction):
        union = sorted(set(f.variables) | set(g.variables))
        if len(union) <= MAX_DENSE_N:
            tf, tg = _project(f, union), _project(g, union)
            scale = f.n - len(union)
            ones = int(np.count_nonzero(tf)) << scale
            if ones == 0:
                raise EmptyFunction("relative distance from an identically-0 function is undefined")
            sym = int(np.count_nonzero(tf != tg)) << scale
            return RelDist(sym, ones)
    tf, tg = _dense(f), _dense(g)
    ones = int(np.count_nonzero(tf))
    if ones == 0:
        raise EmptyFunction("relative distance from an identically-0 function is undefined")
    return RelDist(int(np.count_nonzero(tf != tg)), ones)


def rel_dist_to_class(
    f: BooleanFunction, candidates: Iterable[BooleanFunction]
) -> tuple[RelDist, BooleanFunction]:
    """Minimum of ``rel_dist(f, g)`` over a streamed candidate enumeration."""
    tf = _dense(f)
    ones = int(np.count_nonzero(tf))
    if ones == 0:
        raise EmptyFunction("relative distance from an identically-0 function is undefined")
    best, witness = None, None
    for g in candidates:
        if g.n != f.n:
            raise DimensionError(f"candidate has n={g.n}, expected {f.n}")
        sym = int(np.count_nonzero(tf != g.table()))
        if best is None or sym < best:
            best, witness = sym, g
            if sym == 0:
                break
    if witness is None:
        raise ValueError("empty class enumeration")
    return RelDist(best, ones), witness


def rel_dist_to_juntas(f: BooleanFunction, k: int) -> tuple[RelDist, JuntaFunction]:
    """Distance to the class of all k-juntas via majority projection.

    For a fixed coordinate set J the closest J-junta takes the majority value
    on each cell of J (ties to 0), because the denominator ``|f^{-1}(1)|``
    does not depend on the candidate.
    """
    n = f.n
    tf = _dense(f)
    ones = _require_ones(f)
    c = cube(tf, n)
    k = min(k, n)
    best, best_J, best_core = None, (), None
    for J in combinations(range(1, n + 1), k):
        on = cell_counts(c, J)
        size = 1 << (n - k)
        off = size - on
        sym = int(np.minimum(on, off).sum())
        if best is None or sym < best:
            best, best_J, best_core = sym, J, (on > off).astype(np.uint8)
            if sym == 0:
                break
    return RelDist(best, ones), JuntaFunction(n, best_J, best_core)


def placements(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All injective maps ``[k] -> [n]`` as ordered variable tuples."""
    for J in combinations(range(1, n + 1), k):
        yield from permutations(J)


def rel_dist_to_core_class(
    f: BooleanFunction, k: int, core_tables: Sequence[np.ndarray]
) -> tuple[RelDist, JuntaFunction]:
    """Distance to ``{g_σ : g in core_tables, σ injective [k] -> [n]}``.

    ``core_tables`` are 2^k-entry tables over variables 1..k.  Ties keep the
    first placement found.
    """
    n = f.n
    if k > n:
        raise DimensionError(f"k={k} exceeds n={n}")
    tf = _dense(f)
    ones = _require_ones(f)
    if len(core_tables) == 0:
        raise ValueError("empty class enumeration")
    c = cube(tf, n)
    tm = np.asarray(core_tables, dtype=np.int64).reshape(len(core_tables), 1 << k)
    size = 1 << (n - k)
    best, best_sigma, best_row = None, None, None
    for J in combinations(range(1, n + 1), k):
        for sigma in permutations(J):
            on = cell_counts(c, sigma)
            off = size - on
            # g = 1 on a cell costs its zeros, g = 0 costs its ones
            sym = tm @ off + (1 - tm) @ on
            i = int(np.argmin(sym))
            if best is None or sym[i] < best:
                best, best_sigma, best_row = int(sym[i]), sigma, i
                if best == 0:
                    return RelDist(0, ones), JuntaFunction(n, best_sigma, core_tables[best_row])
    return RelDist(best, ones), JuntaFunction(n, best_sigma, core_tables[best_row])


# ---------------------------------------------------------------- lemma checks

def check_approx_symmetry(f: BooleanFunction, g: BooleanFunction, eps: Fraction) -> bool:
    """If ``rel-dist(f, g) <= eps <= 1/2`` then ``rel-dist(g, f) <= 2 eps``."""
    eps = Fraction(eps)
    if eps < 0 or eps > Fraction(1, 2):
        raise PreconditionError(f"eps={eps} outside [0, 1/2]")
    if g.count_ones() == 0:
        raise PreconditionError("g is identically 0")
    if rel_dist(f, g).value > eps:
        raise PreconditionError("rel-dist(f, g) exceeds eps")
    return rel_dist(g, f).value <= 2 * eps


def check_approx_triangle(
    f: BooleanFunction, g: BooleanFunction, h: BooleanFunction, eps: Fraction, eps2: Fraction
) -> bool:
    """If ``rel-dist(f,g) <= eps`` and ``rel-dist(g,h) <= eps2`` then
    ``rel-dist(f,h) <= eps + (1+eps) eps2``."""
    eps, eps2 = Fraction(eps), Fraction(eps2)
    if eps < 0 or eps2 < 0:
        raise PreconditionError("distances must be non-negative")
    if g.count_ones() == 0:
        raise PreconditionError("g is identically 0")
    if rel_dist(f, g).value > eps or rel_dist(g, h).value > eps2:
        raise PreconditionError("distance hypotheses do not hold")
    return rel_dist(f, h).value <= eps + (1 + eps) * eps2


def rerandomization_gap(f: BooleanFunction, J: Iterable[int] | int) -> Fraction:
    """``Pr[f(u_J ∘ w) = 0]`` for ``u ~ f^{-1}(1)`` and uniform ``w`` off ``J``."""
    n = f.n
    J = _as_indices(J, n)
    tf = _dense(f)
    N = _require_ones(f)
    on = cell_counts(cube(tf, n), J)
    size = 1 << (n - len(J))
    off = size - on
    return Fraction(int((on * off).sum()), N * size)


def key_junta_gap(f: BooleanFunction, X: Iterable[int] | int, J: Iterable[int] | int) -> Fraction:
    """``Pr[f(u_X ∘ w) != f(u_J ∘ y ∘ w)]`` with ``u ~ f^{-1}(1)``, ``w``
    uniform off ``X`` and ``y`` uniform on ``X \\ J``."""
    n = f.n
    X, J = _as_indices(X, n), _as_indices(J, n)
    if not set(J) <= set(X):
        raise PreconditionError("J is not a subset of X")
    tf = _dense(f)
    N = _require_ones(f)
    rest = [i for i in X if i not in J]
    out = [i for i in range(1, n + 1) if i not in X]
    order = J + rest + out
    c = cube(tf, n).transpose([i - 1 for i in order])
    # T[a, b, c]: a on J, b on X\J, c off X (C-order flattening per group)
    T = c.reshape(1 << len(J), 1 << len(rest), 1 << len(out)).astype(np.int64)
    Nu = T.sum(axis=2)                      # u's with u_X = (a, b)
    ones_y = T.sum(axis=1)                  # f(a, y, c) summed over y, per (a, c)
    zeros_y = (1 << len(rest)) - ones_y
    # for each (a, b, c): count of y with T[a,y,c] != T[a,b,c]
    mism = np.where(T == 1, zeros_y[:, None, :], ones_y[:, None, :])
    num = int((Nu[:, :, None] * mism).sum())
    return Fraction(num, N * (1 << len(out)) * (1 << len(rest)))
