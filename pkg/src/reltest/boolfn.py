"""Boolean functions over {0,1}^n.

Assignments are plain Python ints: bit ``i-1`` holds ``x_i``, so the integer
value of an assignment is also its truth-table index.  Variable indices in
the public API are 1-based, as in the usual mathematical notation.

Three representations share one interface:

* :class:`TruthTable` -- a dense table of ``2**n`` bits (n <= 24);
* :class:`JuntaFunction` -- a small core function lifted through an
  injective variable map;
* :class:`DecisionTree` -- a tree whose internal nodes query variables.

All objects are immutable after construction.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Sequence, Union

import numpy as np

MAX_DENSE_N = 24
# Functions with n up to this size get a materialised lookup table for
# fast scalar evaluation.
FAST_TABLE_N = 20

AssignmentLike = Union[int, str, Sequence[int]]


class DimensionError(ValueError):
    """An assignment or function has the wrong number of variables."""


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices: Iterable[int], n: int | None = None) -> int:
    """Bit mask of a set of 1-based variable indices."""
    m = 0
    for i in indices:
        if i < 1 or (n is not None and i > n):
            raise DimensionError(f"variable index {i} outside [1, {n}]")
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> list[int]:
    """1-based variable indices set in ``mask``, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def bits_to_int(bits: str | Sequence[int]) -> int:
    """Read ``x_1 x_2 ... x_n`` (position 1 first) into an int."""
    x = 0
    for i, b in enumerate(bits):
        b = int(b)
        if b not in (0, 1):
            raise ValueError(f"not a bit: {b!r}")
        x |= b << i
    return x


def int_to_bits(x: int, n: int) -> str:
    """Inverse of :func:`bits_to_int`."""
    return "".join(str((x >> i) & 1) for i in range(n))


def as_assignment(x: AssignmentLike, n: int) -> int:
    """Normalise an assignment to an int, checking its dimension."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        x = int(x)
        if x < 0 or x >> n:
            raise DimensionError(f"assignment {x} does not fit in {n} bits")
        return x
    if len(x) != n:
        raise DimensionError(f"assignment has {len(x)} bits, expected {n}")
    return bits_to_int(x)


def compose_partial(u: int, s_mask: int, w: int, w_mask: int, n: int) -> int:
    """Return ``u_S ∘ w``: ``u`` on the coordinates of ``s_mask`` and ``w``
    on the coordinates of ``w_mask``.  The two masks must partition [n]."""
    if s_mask & w_mask:
        raise ValueError("index sets overlap")
    if (s_mask | w_mask) != full_mask(n):
        raise ValueError("index sets do not cover [n]")
    return (u & s_mask) | (w & w_mask)


def flip_block(x: int, block_mask: int) -> int:
    """Complement every bit of ``x`` inside ``block_mask``."""
    return x ^ block_mask


def check_permutation(pi: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate a permutation given as ``pi[i-1] = π(i)`` (1-based)."""
    pi = tuple(int(p) for p in pi)
    if len(pi) != n or sorted(pi) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of [1, {n}]: {pi}")
    return pi


def permute_assignment(x: int, pi: Sequence[int]) -> int:
    """``π(x) = x_{π(1)} x_{π(2)} ... x_{π(n)}``."""
    y = 0
    for i, p in enumerate(pi):
        y |= ((x >> (p - 1)) & 1) << i
    return y


def compose_permutations(rho: Sequence[int], pi: Sequence[int]) -> tuple[int, ...]:
    """``ρ∘π`` as an index map, ``(ρ∘π)(i) = ρ(π(i))``.

    With ``f_π(x) = f(π(x))`` this gives ``(f_π)_ρ = f_{ρ∘π}``.
    """
    return tuple(rho[p - 1] for p in pi)


def _all_points(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _extract(points: np.ndarray, variables: Sequence[int]) -> np.ndarray:
    """Core index ``Σ x_{variables[i]} 2^i`` for each point."""
    idx = np.zeros(points.shape, dtype=np.int64)
    for i, v in enumerate(variables):
        idx |= ((points >> (v - 1)) & 1) << i
    return idx


class BooleanFunction(ABC):
    """A function {0,1}^n -> {0,1}."""

    n: int

    @abstractmethod
    def __call__(self, x: int) -> int:
        """Evaluate at an int assignment (no dimension check)."""

    @abstractmethod
    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an int64 array of assignments (requires n <= 62)."""

    @abstractmethod
    def count_ones(self) -> int:
        """``|f^{-1}(1)|``."""

    @abstractmethod
    def permute(self, pi: Sequence[int]) -> "BooleanFunction":
        """Return ``f_π`` with ``f_π(x) = f(π(x))``."""

    @abstractmethod
    def complement(self) -> "BooleanFunction":
        ...

    def evaluate(self, x: AssignmentLike) -> int:
        return self(as_assignment(x, self.n))

    def table(self) -> np.ndarray:
        """Dense uint8 truth table of length ``2**n``."""
        if self.n > MAX_DENSE_N:
            raise DimensionError(f"n={self.n} exceeds the dense limit {MAX_DENSE_N}")
        return self._table_cached

    @cached_property
    def _table_cached(self) -> np.ndarray:
        t = self.evaluate_many(_all_points(self.n)).astype(np.uint8)
        t.flags.writeable = False
        return t

    @cached_property
    def fast(self) -> Callable[[int], int]:
        """Fastest available scalar evaluator."""
        if self.n <= FAST_TABLE_N:
            return self.table().tobytes().__getitem__
        return self.__call__

    def to_dense(self) -> "TruthTable":
        return TruthTable(self.n, self.table())

    def is_zero(self) -> bool:
        return self.count_ones() == 0


class TruthTable(BooleanFunction):
    """Dense table; ``bits[x]`` is ``f(x)``."""

    def __init__(self, n: int, bits: Iterable[int] | np.ndarray):
        if n < 0 or n > MAX_DENSE_N:
            raise DimensionError(f"dense tables need 0 <= n <= {MAX_DENSE_N}, got {n}")
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if arr.shape[0] != 1 << n:
            raise DimensionError(f"table has {arr.shape[0]} entries, expected {1 << n}")
        if arr.size and arr.max() > 1:
            raise ValueError("table entries must be 0 or 1")
        arr.flags.writeable = False
        self.n = n
        self._bits = arr
        self._bytes = arr.tobytes()

    @classmethod
    def from_int(cls, n: int, value: int) -> "TruthTable":
        """Table whose entry ``x`` is bit ``x`` of ``value``."""
        size = 1 << n
        raw = np.frombuffer(value.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return cls(n, np.unpackbits(raw, bitorder="little")[:size])

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[int], int]) -> "TruthTable":
        return cls(n, [fn(x) & 1 for x in range(1 << n)])

    def to_int(self) -> int:
        packed = np.packbits(self._bits, bitorder="little").tobytes()
        return int.from_bytes(packed, "little")

    def __call__(self, x: int) -> int:
        return self._bytes[x]

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        return self._bits[np.asarray(points, dtype=np.int64)]

    def table(self) -> np.ndarray:
        return self._bits

    @cached_property
    def fast(self) -> Callable[[int], int]:
        return self._bytes.__getitem__

    def count_ones(self) -> int:
        return int(np.count_nonzero(self._bits))

    def permute(self, pi: Sequence[int]) -> "TruthTable":
        pi = check_permutation(pi, self.n)
        pts = _all_points(self.n)
        return TruthTable(self.n, self._bits[_extract(pts, pi)])

    def complement(self) -> "TruthTable":
        return TruthTable(self.n, 1 - self._bits)

    def __repr__(self) -> str:
        return f"TruthTable(n={self.n}, ones={self.count_ones()})"


class JuntaFunction(BooleanFunction):
    """``g_σ(x) = g(σ^{-1}(x))``: core ``g`` over h variables read from
    ``x_{σ(1)}, ..., x_{σ(h)}``."""

    def __init__(self, n: int, variables: Sequence[int], core: BooleanFunction | Iterable[int]):
        variables = tuple(int(v) for v in variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"variable map is not injective: {variables}")
        if any(v < 1 or v > n for v in variables):
            raise DimensionError(f"variables {variables} not inside [1, {n}]")
        if not isinstance(core, BooleanFunction):
            core = TruthTable(len(variables), core)
        if core.n != len(variables):
            raise DimensionError(f"core has {core.n} variables, map has {len(variables)}")
        self.n = n
        self.variables = variables
        self.core = core if isinstance(core, TruthTable) else core.to_dense()
        self._core_bytes = self.core.table().tobytes()
        self._shifts = tuple((v - 1, i) for i, v in enumerate(variables))

    @property
    def h(self) -> int:
        return len(self.variables)

    @cached_property
    def support_mask(self) -> int:
        return mask_of(self.variables)

    def core_index(self, x: int) -> int:
        idx = 0
        for src, dst in self._shifts:
            idx |= ((x >> src) & 1) << dst
        return idx

    def __call__(self, x: int) -> int:
        return self._core_bytes[self.core_index(x)]

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        return self.core.table()[_extract(points, self.variables)]

    def count_ones(self) -> int:
        return self.core.count_ones() << (self.n - self.h)

    def permute(self, pi: Sequence[int]) -> "JuntaFunction":
        pi = check_permutation(pi, self.n)
        return JuntaFunction(self.n, [pi[v - 1] for v in self.variables], self.core)

    def complement(self) -> "JuntaFunction":
        return JuntaFunction(self.n, self.variables, self.core.complement())

    def scatter(self, core_x: int) -> int:
        """The n-bit pattern that places core assignment ``core_x`` on σ."""
        x = 0
        for src, dst in self._shifts:
            x |= ((core_x >> dst) & 1) << src
        return x

    def __repr__(self) -> str:
        return f"JuntaFunction(n={self.n}, vars={self.variables}, core=0x{self.core.to_int():x})"


class Leaf(NamedTuple):
    value: int


class Node(NamedTuple):
    var: int
    low: "Leaf | Node"
    high: "Leaf | Node"


Tree = Union[Leaf, Node]


class DecisionTree(BooleanFunction):
    """Decision tree; ``size`` is the number of leaves."""

    def __init__(self, n: int, root: Tree):
        self.n = n
        self.root = root
        self.size = self._validate(root, frozenset())

    def _validate(self, node: Tree, path: frozenset) -> int:
        if isinstance(node, Leaf):
            if node.value not in (0, 1):
                raise ValueError(f"leaf value must be a bit, got {node.value!r}")
            return 1
        if not 1 <= node.var <= self.n:
            raise DimensionError(f"tree variable x{node.var} outside [1, {self.n}]")
        if node.var in path:
            raise ValueError(f"variable x{node.var} repeats on a root-to-leaf path")
        inner = path | {node.var}
        return self._validate(node.low, inner) + self._validate(node.high, inner)

    def __call__(self, x: int) -> int:
        node = self.root
        while isinstance(node, Node):
            node = node.high if (x >> (node.var - 1)) & 1 else node.low
        return node.value

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        out = np.zeros(points.shape, dtype=np.uint8)

        def walk(node: Tree, sel: np.ndarray) -> None:
            if isinstance(node, Leaf):
                out[sel] = node.value
                return
            bit = ((points >> (node.var - 1)) & 1).astype(bool)
            walk(node.low, sel & ~bit)
            walk(node.high, sel & bit)

        walk(self.root, np.ones(points.shape, dtype=bool))
        return out

    def leaves(self) -> list[tuple[int, int, int, int]]:
        """``(value, depth, fixed_mask, fixed_bits)`` for every leaf."""
        out = []

        def walk(node: Tree, depth: int, fmask: int, fbits: int) -> None:
            if isinstance(node, Leaf):
                out.append((node.value, depth, fmask, fbits))
                return
            b = 1 << (node.var - 1)
            walk(node.low, depth + 1, fmask | b, fbits)
            walk(node.high, depth + 1, fmask | b, fbits | b)

        walk(self.root, 0, 0, 0)
        return out

    def count_ones(self) -> int:
        return sum(1 << (self.n - d) for v, d, _, _ in self.leaves() if v)

    def permute(self, pi: Sequence[int]) -> "DecisionTree":
        pi = check_permutation(pi, self.n)

        def relabel(node: Tree) -> Tree:
            if isinstance(node, Leaf):
                return node
            return Node(pi[node.var - 1], relabel(node.low), relabel(node.high))

        return DecisionTree(self.n, relabel(self.root))

    def complement(self) -> "DecisionTree":
        def neg(node: Tree) -> Tree:
            if isinstance(node, Leaf):
                return Leaf(1 - node.value)
            return Node(node.var, neg(node.low), neg(node.high))

        return DecisionTree(self.n, neg(self.root))

    def expr(self) -> str:
        def show(node: Tree) -> str:
            if isinstance(node, Leaf):
                return str(node.value)
            return f"(x{node.var} {show(node.low)} {show(node.high)})"

        return show(self.root)

    def __repr__(self) -> str:
        return f"DecisionTree(n={self.n}, {self.expr()})"


# Convenience constructors used throughout tests and generators.

def constant(n: int, value: int) -> JuntaFunction:
    return JuntaFunction(n, (), [value])


def literal(n: int, var: int, positive: bool = True) -> JuntaFunction:
    return JuntaFunction(n, (var,), [0, 1] if positive else [1, 0])


def parity(n: int, variables: Sequence[int]) -> JuntaFunction:
    h = len(variables)
    return JuntaFunction(n, variables, [bin(c).count("1") & 1 for c in range(1 << h)])


def conjunction(n: int, variables: Sequence[int]) -> JuntaFunction:
    h = len(variables)
    return JuntaFunction(n, variables, [int(c == (1 << h) - 1) for c in range(1 << h)])


def evaluate(f: BooleanFunction, x: AssignmentLike) -> int:
    return f.evaluate(x)


def count_satisfying(f: BooleanFunction) -> int:
    return f.count_ones()


def apply_permutation(f: BooleanFunction, pi: Sequence[int]) -> BooleanFunction:
    return f.permute(pi)
