"""One-line text descriptions of Boolean functions.

::

    table n=3 hex=8e
    junta n=10 vars=2,5 core=8
    dtree n=6 expr=(x1 0 (x4 1 0))

Hex strings are LSB-first: hex digit ``j`` (counting from the left) holds
table entries ``4j .. 4j+3``, entry ``4j`` being the digit's low bit.  A
table with fewer than 4 entries still uses one digit.
"""

from __future__ import annotations

import re

import numpy as np

from .boolfn import BooleanFunction, DecisionTree, JuntaFunction, Leaf, Node, TruthTable


class FormatError(ValueError):
    pass


def table_to_hex(bits) -> str:
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    pad = (-len(bits)) % 4
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    quads = bits.reshape(-1, 4)
    vals = quads[:, 0] | (quads[:, 1] << 1) | (quads[:, 2] << 2) | (quads[:, 3] << 3)
    return "".join("0123456789abcdef"[v] for v in vals)


def hex_to_table(text: str, size: int) -> np.ndarray:
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    want = max(1, (size + 3) // 4)
    if len(text) != want:
        raise FormatError(f"expected {want} hex digits for {size} entries, got {len(text)}")
    try:
        vals = np.array([int(ch, 16) for ch in text], dtype=np.uint8)
    except ValueError as exc:
        raise FormatError(f"bad hex string {text!r}") from exc
    bits = ((vals[:, None] >> np.arange(4, dtype=np.uint8)) & 1).reshape(-1)
    if bits[size:].any():
        raise FormatError("nonzero padding bits beyond the table")
    return bits[:size].astype(np.uint8)


_FIELD = re.compile(r"(\w+)=(\S+|\(.*\))")


def _fields(rest: str) -> dict[str, str]:
    out = {}
    # expr= may contain spaces, so take it verbatim to the end of the line
    if "expr=" in rest:
        head, expr = rest.split("expr=", 1)
        out["expr"] = expr.strip()
        rest = head
    for key, val in _FIELD.findall(rest):
        out[key] = val
    return out


def parse_tree(expr: str, n: int) -> DecisionTree:
    tokens = expr.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError("unexpected end of tree expression")
        tok = tokens[pos]
        pos += 1
        if tok in ("0", "1"):
            return Leaf(int(tok))
        if tok != "(":
            raise FormatError(f"unexpected token {tok!r}")
        var = tokens[pos]
        pos += 1
        if not re.fullmatch(r"x\d+", var):
            raise FormatError(f"expected a variable like x3, got {var!r}")
        low = parse()
        high = parse()
        if pos >= len(tokens) or tokens[pos] != ")":
            raise FormatError("missing ')'")
        pos += 1
        return Node(int(var[1:]), low, high)

    root = parse()
    if pos != len(tokens):
        raise FormatError("trailing tokens after tree expression")
    return DecisionTree(n, root)


def parse_function(line: str) -> BooleanFunction:
    line = line.strip()
    kind, _, rest = line.partition(" ")
    f = _fields(rest)
    try:
        n = int(f["n"])
        if kind == "table":
            return TruthTable(n, hex_to_table(f["hex"], 1 << n))
        if kind == "junta":
            vs = [int(v) for v in f["vars"].split(",") if v] if f.get("vars", "") not in ("", "-") else []
            return JuntaFunction(n, vs, hex_to_table(f["core"], 1 << len(vs)))
        if kind == "dtree":
            return parse_tree(f["expr"], n)
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r} in {line!r}") from None
    raise FormatError(f"unknown function kind {kind!r}")


def format_function(f: BooleanFunction) -> str:
    if isinstance(f, JuntaFunction):
        vs = ",".join(str(v) for v in f.variables) or "-"
        return f"junta n={f.n} vars={vs} core={table_to_hex(f.core.table())}"
    if isinstance(f, DecisionTree):
        return f"dtree n={f.n} expr={f.expr()}"
    return f"table n={f.n} hex={table_to_hex(f.table())}"


def load_function(path: str) -> BooleanFunction:
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 1:
        raise FormatError(f"{path}: expected exactly one function line, found {len(lines)}")
    return parse_function(lines[0])


def save_function(f: BooleanFunction, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_function(f) + "\n")
