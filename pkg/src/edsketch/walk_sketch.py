"""Per-walk sketching: streaming segment-tree encoder and the referee-side
decoder that turns a sketch pair into an effective alignment.

The encoder walks the string once, maintains one open segment per tree
level, and inserts every completed node's 6-tuple into the difference
digest. The decoder subtracts digests, recovers the differing tuples,
and walks the tree top-down: identical subtrees contribute diagonal
edges, differing leaves contribute literal characters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernel import kernel
from ._mix import PURPOSE_WALK, derive_key
from .recovery import FAIL, DiffSketch, SketchSalts
from .rolling_hash import HashParams
from .strings import InputString

MAX_SYMBOL = 1 << 32


class WalkDecodeError(Exception):
    """Per-walk decode failure; the caller treats the walk as lost."""


@dataclass(frozen=True)
class TreeShape:
    n: int
    m: int
    depth: int

    @classmethod
    def for_length(cls, n: int, step_factor: int = 3) -> "TreeShape":
        """m = step_factor * n, padded up to a power of two."""
        raw = max(step_factor * n, 1)
        depth = max(1, (raw - 1).bit_length())
        return cls(n, 1 << depth, depth)

    def segment(self, i: int, j: int) -> tuple[int, int]:
        """Output positions [a..b] covered by node (i, j)."""
        width = self.m >> i
        return 1 + (j - 1) * width, j * width


@dataclass
class WalkSketch:
    l01: int
    digest: DiffSketch

    def to_bytes(self) -> bytes:
        return int(self.l01).to_bytes(4, "little") + self.digest.to_bytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "WalkSketch":
        l01 = int.from_bytes(raw[:4], "little")
        return cls(l01, DiffSketch.from_bytes(raw[4:]))

    def byte_size(self) -> int:
        return 4 + self.digest.byte_size()


@dataclass
class EffectiveAlignment:
    """Diagonal runs of matched positions plus literal characters for the
    rest. chars may also cover matched positions; the g_x/g_y views are
    restricted to unmatched ones."""

    n: int
    run_xs: np.ndarray
    run_ys: np.ndarray
    run_lens: np.ndarray
    chars_x: dict[int, int] = field(default_factory=dict)
    chars_y: dict[int, int] = field(default_factory=dict)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for x0, y0, ln in zip(self.run_xs, self.run_ys, self.run_lens):
            out.extend((int(x0) + t, int(y0) + t) for t in range(int(ln)))
        return out

    def matched_x(self) -> np.ndarray:
        mask = np.zeros(self.n + 1, dtype=bool)
        for x0, ln in zip(self.run_xs, self.run_lens):
            mask[int(x0):int(x0) + int(ln)] = True
        return mask

    def matched_y(self) -> np.ndarray:
        mask = np.zeros(self.n + 1, dtype=bool)
        for y0, ln in zip(self.run_ys, self.run_lens):
            mask[int(y0):int(y0) + int(ln)] = True
        return mask

    @property
    def g_x(self) -> dict[int, int]:
        matched = self.matched_x()
        return {p: c for p, c in self.chars_x.items() if not matched[p]}

    @property
    def g_y(self) -> dict[int, int]:
        matched = self.matched_y()
        return {q: c for q, c in self.chars_y.items() if not matched[q]}


def encode_walk(s: InputString, seed: int, walk_index: int, shape: TreeShape,
                delta: int) -> WalkSketch:
    """Single pass over s: one coupled walk plus digest of all tree nodes."""
    salts = SketchSalts.for_walk(seed, walk_index)
    hp = HashParams.for_walk(seed, walk_index)
    walk_key = derive_key(seed, walk_index, PURPOSE_WALK)
    digest = DiffSketch(delta, salts)
    l01, tag = kernel.encode_walk_cells(
        s.symbols, s.n, shape.m, shape.depth, walk_key, hp.base,
        salts.cell, salts.checksum, salts.tag, digest.cells)
    digest.tag = tag
    return WalkSketch(l01, digest)


def decode_walk(sx: WalkSketch, sy: WalkSketch, n: int, shape: TreeShape,
                delta: Optional[int] = None) -> Optional[EffectiveAlignment]:
    """Effective alignment of the two sketched walks, or None on error."""
    try:
        return _decode_walk(sx, sy, n, shape, delta)
    except WalkDecodeError:
        return None


def _decode_walk(sx, sy, n, shape, delta):
    if sx.l01 < n or sy.l01 < n:
        raise WalkDecodeError("walk did not pass through the string")
    diff = sx.digest.subtract(sy.digest)
    decoded = diff.decode(delta)
    if decoded is FAIL:
        raise WalkDecodeError("digest decode failed")

    marked: dict[tuple[int, int], list] = {}
    for key, sign in decoded:
        node = (key.depth, key.index)
        slot = 0 if sign == 1 else 1
        entry = marked.setdefault(node, [None, None])
        if entry[slot] is not None:
            raise WalkDecodeError("duplicate tuple for one node")
        entry[slot] = key
    for node, (kx, ky) in marked.items():
        if kx is None or ky is None:
            raise WalkDecodeError("one-sided difference at a node")
        if not (0 <= node[0] <= shape.depth and 1 <= node[1] <= 1 << node[0]):
            raise WalkDecodeError("tuple outside the tree")

    out = _Collector(n)
    budget = [2 * len(marked) + 1]

    def dfs(i, j, s_x, e_x, s_y, e_y):
        if (i, j) not in marked:
            if e_x - s_x != e_y - s_y or e_x < s_x:
                raise WalkDecodeError("inconsistent unmarked segment")
            out.add_run(s_x, s_y, e_x - s_x + 1)
            return
        budget[0] -= 1
        if budget[0] < 0:
            raise WalkDecodeError("recursion exceeded marked-node budget")
        kx, ky = marked[(i, j)]
        if i == shape.depth:
            if e_x != s_x or e_y != s_y:
                raise WalkDecodeError("leaf with non-unit range")
            out.add_char_x(s_x, kx.h)
            out.add_char_y(s_y, ky.h)
            return
        left = (i + 1, 2 * j - 1)
        right = (i + 1, 2 * j)
        if left in marked:
            lx, ly = marked[left]
            m_x = s_x + lx.length - 1
            m_y = s_y + ly.length - 1
            o_x = 1 - lx.beta
            o_y = 1 - ly.beta
            dfs(left[0], left[1], s_x, m_x, s_y, m_y)
            dfs(right[0], right[1], m_x + o_x, e_x, m_y + o_y, e_y)
        elif right in marked:
            rx, ry = marked[right]
            m_x = e_x - rx.length + 1
            m_y = e_y - ry.length + 1
            o_x = 1 - rx.alpha
            o_y = 1 - ry.alpha
            dfs(left[0], left[1], s_x, m_x - o_x, s_y, m_y - o_y)
            dfs(right[0], right[1], m_x, e_x, m_y, e_y)
        else:
            raise WalkDecodeError("marked node with both children unmarked")

    if (0, 1) not in marked and sx.l01 != sy.l01:
        raise WalkDecodeError("identical digests but different pre-image lengths")
    dfs(0, 1, 1, sx.l01, 1, sy.l01)
    return out.finish()


class _Collector:
    """Accumulates DFS output and enforces the alignment invariants."""

    def __init__(self, n: int):
        self.n = n
        self.runs: list[tuple[int, int, int]] = []
        self.chars_x: dict[int, int] = {}
        self.chars_y: dict[int, int] = {}

    def add_char_x(self, p: int, c: int):
        if p > self.n:
            return
        if c >= MAX_SYMBOL:
            raise WalkDecodeError("decoded character outside any alphabet")
        if self.chars_x.get(p, c) != c:
            raise WalkDecodeError("conflicting characters for one x position")
        self.chars_x[p] = c

    def add_char_y(self, q: int, c: int):
        if q > self.n:
            return
        if c >= MAX_SYMBOL:
            raise WalkDecodeError("decoded character outside any alphabet")
        if self.chars_y.get(q, c) != c:
            raise WalkDecodeError("conflicting characters for one y position")
        self.chars_y[q] = c

    def add_run(self, s_x: int, s_y: int, ln: int):
        # Clip the diagonal run to [1..n] x [1..n]; positions past one
        # string's end pin the other side's character to the padding 0.
        both = min(ln, self.n - s_x + 1, self.n - s_y + 1)
        if both > 0:
            self.runs.append((s_x, s_y, both))
        for t in range(max(both, 0), ln):
            px, py = s_x + t, s_y + t
            if px > self.n and py > self.n:
                break
            if px <= self.n:
                self.add_char_x(px, 0)
            else:
                self.add_char_y(py, 0)

    def finish(self) -> EffectiveAlignment:
        cov_x = np.zeros(self.n + 2, dtype=bool)
        cov_y = np.zeros(self.n + 2, dtype=bool)
        for s_x, s_y, ln in self.runs:
            cov_x[s_x:s_x + ln] = True
            cov_y[s_y:s_y + ln] = True
        for p in self.chars_x:
            cov_x[p] = True
        for q in self.chars_y:
            cov_y[q] = True
        if not (cov_x[1:self.n + 1].all() and cov_y[1:self.n + 1].all()):
            raise WalkDecodeError("alignment does not cover every position")
        runs = np.array(self.runs, dtype=np.int64).reshape(-1, 3)
        return EffectiveAlignment(self.n, runs[:, 0].copy(), runs[:, 1].copy(),
                                  runs[:, 2].copy(), self.chars_x, self.chars_y)
