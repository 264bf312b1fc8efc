"""Strings, edit scripts and matchings, plus the ground-truth oracles.

All protocol math is 1-based and strings are implicitly padded with
infinitely many zeros past their logical length.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernel import kernel

DP_INF = kernel.DP_INF


class InvalidScriptError(ValueError):
    """An edit script does not apply cleanly or does not produce y."""


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("alphabet needs at least the padding symbol 0 and one more")
        if self.size > 1 << 32:
            raise ValueError("symbols are 32-bit integers")


class InputString:
    """Symbol sequence of logical length n; reads past n give 0."""

    __slots__ = ("symbols", "n")

    def __init__(self, symbols: Sequence[int] | np.ndarray, n: Optional[int] = None):
        arr = np.asarray(symbols, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("expected a flat symbol sequence")
        if np.any(arr < 0):
            raise ValueError("symbols are non-negative integers")
        self.symbols = arr
        self.n = len(arr) if n is None else int(n)
        if self.n != len(arr):
            raise ValueError("logical length must match the stored symbols")

    def at(self, i: int) -> int:
        """1-based read with zero padding beyond n."""
        if i < 1:
            raise IndexError("positions are 1-based")
        return int(self.symbols[i - 1]) if i <= self.n else 0

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, InputString) and self.n == other.n and bool(
            np.array_equal(self.symbols, other.symbols)
        )

    def __repr__(self) -> str:
        body = " ".join(str(s) for s in self.symbols[:16])
        tail = " ..." if self.n > 16 else ""
        return f"InputString(n={self.n}, [{body}{tail}])"

    @classmethod
    def from_text(cls, text: str) -> "InputString":
        """Convenience: one symbol per character (a=1, b=2, ...)."""
        return cls([ord(ch) - ord("a") + 1 for ch in text])


class OpKind(enum.Enum):
    INSERT = "insert"
    DELETE = "delete"
    SUBSTITUTE = "substitute"


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    position: int
    symbol: Optional[int] = None

    def __post_init__(self):
        if self.position < 1:
            raise ValueError("positions are 1-based")
        if self.kind is OpKind.DELETE and self.symbol is not None:
            raise ValueError("delete carries no symbol")
        if self.kind is not OpKind.DELETE and self.symbol is None:
            raise ValueError(f"{self.kind.value} needs a symbol")


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...] = ()

    def __len__(self) -> int:
        return len(self.ops)

    @classmethod
    def of(cls, ops: Iterable[EditOp]) -> "EditScript":
        return cls(tuple(ops))


@dataclass(frozen=True)
class Matching:
    """Non-intersecting set of edges (i, j) between x and y positions."""

    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = (0, 0)
        for e in self.edges:
            if not (e[0] > prev[0] and e[1] > prev[1]):
                raise ValueError("edges must be sorted and non-intersecting")
            prev = e

    def __len__(self) -> int:
        return len(self.edges)


# ---------------------------------------------------------------------------
# Script application


def apply_script(x: InputString, script: EditScript) -> InputString:
    """Perform the ops in order; positions refer to the evolving string."""
    buf = list(x.symbols)
    for op in script.ops:
        if op.kind is OpKind.INSERT:
            if op.position > len(buf) + 1:
                raise InvalidScriptError(f"insert at {op.position} beyond length {len(buf)}")
            buf.insert(op.position - 1, op.symbol)
        elif op.kind is OpKind.DELETE:
            if op.position > len(buf):
                raise InvalidScriptError(f"delete at {op.position} beyond length {len(buf)}")
            del buf[op.position - 1]
        else:
            if op.position > len(buf):
                raise InvalidScriptError(f"substitute at {op.position} beyond length {len(buf)}")
            buf[op.position - 1] = op.symbol
    return InputString(buf)


# ---------------------------------------------------------------------------
# Distance and optimal scripts

_ALL_OK = None


def _ones(m: int) -> np.ndarray:
    return np.ones(m, dtype=np.uint8)


def _dp(x: InputString, y: InputString, band: Optional[int]):
    xl = x.symbols
    yl = y.symbols
    if band is None:
        band = max(len(xl), len(yl), 1)
    dist, moves = kernel.banded_dp(xl, yl, band, _ones(len(yl)), _ones(len(yl)))
    return dist, moves, band


def traceback_ops(moves, band: int, lx: int, ly: int, y_symbol):
    """Walk a banded move matrix back from (lx, ly) and return column ops
    as (x_index, kind, symbol) in left-to-right order. kind uses OpKind;
    inserts attach before x position x_index + 1."""
    ops = []
    i, j = lx, ly
    while i > 0 or j > 0:
        mv = moves[i][j - i + band]
        if mv == kernel.DP_MATCH:
            i -= 1
            j -= 1
        elif mv == kernel.DP_SUB:
            ops.append((i, OpKind.SUBSTITUTE, y_symbol(j)))
            i -= 1
            j -= 1
        elif mv == kernel.DP_DEL:
            ops.append((i, OpKind.DELETE, None))
            i -= 1
        elif mv == kernel.DP_INS:
            ops.append((i, OpKind.INSERT, y_symbol(j)))
            j -= 1
        else:
            raise InvalidScriptError("traceback fell off the computed band")
    ops.reverse()
    return ops


def column_ops_to_script(ops) -> EditScript:
    """Convert (x_index, kind, symbol) column ops into a sequential script
    whose positions track the evolving string."""
    out = []
    shift = 0
    for x_idx, kind, sym in ops:
        if kind is OpKind.DELETE:
            out.append(EditOp(OpKind.DELETE, x_idx + shift))
            shift -= 1
        elif kind is OpKind.SUBSTITUTE:
            out.append(EditOp(OpKind.SUBSTITUTE, x_idx + shift, sym))
        else:  # insert before x position x_idx + 1
            out.append(EditOp(OpKind.INSERT, x_idx + shift + 1, sym))
            shift += 1
    return EditScript.of(out)


def edit_distance(x: InputString, y: InputString, band: Optional[int] = None):
    """Exact edit distance and an optimal script transforming x into y.

    With a band b the DP is restricted to |i - j| <= b, which is exact
    whenever ed(x, y) <= b (optimal matchings stay within the band)."""
    dist, moves, band_used = _dp(x, y, band)
    if dist >= DP_INF:
        raise ValueError("band too narrow for these lengths")
    cols = traceback_ops(moves, band_used, len(x), len(y), lambda j: y.at(j))
    script = column_ops_to_script(cols)
    assert len(script) == dist
    return dist, script


def lcs_length(x: InputString, y: InputString) -> int:
    prev = np.zeros(len(y) + 1, dtype=np.int64)
    for i in range(1, len(x) + 1):
        curr = np.zeros(len(y) + 1, dtype=np.int64)
        xi = x.at(i)
        for j in range(1, len(y) + 1):
            if xi == y.at(j):
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return int(prev[len(y)])


# ---------------------------------------------------------------------------
# Matchings


def matching_from_script(x: InputString, y: InputString, script: EditScript) -> Matching:
    """Edges connecting every x character that is neither substituted nor
    deleted to its counterpart in y."""
    # Tag each buffer slot with its origin x position (or None) and
    # whether it was touched by a substitution.
    tagged: list[Optional[int]] = list(range(1, x.n + 1))
    for op in script.ops:
        if op.kind is OpKind.INSERT:
            if op.position > len(tagged) + 1:
                raise InvalidScriptError("insert position out of range")
            tagged.insert(op.position - 1, None)
        elif op.kind is OpKind.DELETE:
            if op.position > len(tagged):
                raise InvalidScriptError("delete position out of range")
            del tagged[op.position - 1]
        else:
            if op.position > len(tagged):
                raise InvalidScriptError("substitute position out of range")
            tagged[op.position - 1] = None
    if apply_script(x, script) != y:
        raise InvalidScriptError("script does not transform x into y")
    edges = [(orig, j + 1) for j, orig in enumerate(tagged) if orig is not None]
    return Matching(tuple(edges))


def _prefix_table(x: InputString, y: InputString) -> np.ndarray:
    """D[i][j] = ed(x[1..i], y[1..j]) for the greedy-matching search."""
    lx, ly = len(x), len(y)
    d = np.zeros((lx + 1, ly + 1), dtype=np.int64)
    d[0, :] = np.arange(ly + 1)
    d[:, 0] = np.arange(lx + 1)
    xs = x.symbols
    ys = y.symbols
    for i in range(1, lx + 1):
        sub = d[i - 1, :-1] + (xs[i - 1] != ys)
        dele = d[i - 1, 1:] + 1
        row = d[i]
        best = np.minimum(sub, dele)
        for j in range(1, ly + 1):
            row[j] = min(best[j - 1], row[j - 1] + 1)
    return d


def greedy_optimal_matching(x: InputString, y: InputString) -> Matching:
    """The canonical optimal matching: among matchings induced by optimal
    scripts, the one whose sorted edge sequence is lexicographically
    smallest (a missing edge compares larger than any edge).

    Built edge by edge: from the current state, the next edge is the
    smallest (a, b) with x[a] = y[b] that some optimal completion matches
    first; the gap before it is bridged by max(da, db) non-matching edits.
    """
    d = _prefix_table(x, y)
    # Suffix table via the reversed strings.
    xr = InputString(x.symbols[::-1].copy())
    yr = InputString(y.symbols[::-1].copy())
    rrev = _prefix_table(xr, yr)
    lx, ly = len(x), len(y)
    r = rrev[::-1, ::-1]  # r[i][j] = ed(x[i+1..], y[j+1..])
    total = int(d[lx, ly])
    edges = []
    i, j = 0, 0
    while True:
        best = None
        for a in range(i + 1, lx + 1):
            gap_a = a - 1 - i
            if gap_a >= DP_INF:
                break
            if best is not None and a > best[0]:
                break
            for b in range(j + 1, ly + 1):
                if best is not None and (a, b) >= best:
                    break
                if x.at(a) != y.at(b):
                    continue
                bridge = max(gap_a, b - 1 - j)
                if int(d[i, j]) + bridge + int(r[a, b]) == total:
                    best = (a, b)
                    break
        if best is None:
            break
        edges.append(best)
        i, j = best
    return Matching(tuple(edges))


def enumerate_optimal_matchings(x: InputString, y: InputString) -> list[Matching]:
    """All matchings induced by optimal scripts (exhaustive; small inputs
    only). Oracle for the greedy matching."""
    d = _prefix_table(x, y)
    lx, ly = len(x), len(y)
    results: set[tuple] = set()

    def rec(i: int, j: int, acc: list):
        if i == 0 and j == 0:
            results.add(tuple(reversed(acc)))
            return
        here = int(d[i, j])
        if i > 0 and j > 0 and x.at(i) == y.at(j) and int(d[i - 1, j - 1]) == here:
            acc.append((i, j))
            rec(i - 1, j - 1, acc)
            acc.pop()
        if i > 0 and j > 0 and x.at(i) != y.at(j) and int(d[i - 1, j - 1]) + 1 == here:
            rec(i - 1, j - 1, acc)
        if i > 0 and int(d[i - 1, j]) + 1 == here:
            rec(i - 1, j, acc)
        if j > 0 and int(d[i, j - 1]) + 1 == here:
            rec(i, j - 1, acc)

    rec(lx, ly, [])
    return [Matching(edges) for edges in results]


def lex_min_matching(matchings: Iterable[Matching]) -> Matching:
    """Smallest matching where a missing edge compares larger than any
    present edge (so longer prefixes of small edges win)."""
    sentinel = (1 << 60, 1 << 60)

    def key(m: Matching):
        return tuple(m.edges) + (sentinel,)

    return min(matchings, key=key)


# ---------------------------------------------------------------------------
# Token file I/O


def write_string_file(path, s: InputString, alphabet: Alphabet) -> None:
    with open(path, "w") as fh:
        fh.write(f"{s.n} {alphabet.size}\n")
        fh.write(" ".join(str(int(c)) for c in s.symbols) + "\n")


def read_string_file(path) -> tuple[InputString, Alphabet]:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header 'n alphabet_size'")
        n, sigma = int(header[0]), int(header[1])
        symbols = [int(tok) for tok in fh.readline().split()]
    if len(symbols) != n:
        raise ValueError(f"expected {n} symbols, found {len(symbols)}")
    if any(c >= sigma for c in symbols):
        raise ValueError("symbol outside the declared alphabet")
    return InputString(symbols), Alphabet(sigma)
