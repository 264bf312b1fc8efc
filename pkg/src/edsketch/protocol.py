"""Full sketching protocol: two party-side encoders and the referee.

Each party runs tau independent sketched walks under a shared seed. The
referee decodes each walk pair into an effective alignment, merges the
alignments' equalities, and extracts a minimum edit script; anything
inconsistent or longer than k becomes an error report.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._kernel import kernel
from .recovery import cell_count_for
from .strings import (
    EditScript,
    InputString,
    column_ops_to_script,
    traceback_ops,
)
from .walk_sketch import (
    EffectiveAlignment,
    TreeShape,
    WalkSketch,
    decode_walk,
    encode_walk,
)

MAGIC = b"EDSK"
VERSION = 1


def default_tau(n: int, k: int, delta: float, multiplier: float = 4.0) -> int:
    return max(1, math.ceil(multiplier * k * math.log(n / delta)))


@dataclass(frozen=True)
class ProtocolParams:
    n: int
    k: int
    delta: float
    seed: int
    tau: Optional[int] = None
    c_walk: int = 2

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0,1)")
        if not 0 <= self.seed < 1 << 128:
            raise ValueError("seed is a 128-bit value")
        if self.walks < 1:
            raise ValueError("tau must be positive")

    @property
    def walks(self) -> int:
        return self.tau if self.tau is not None else default_tau(self.n, self.k, self.delta)

    @property
    def eta(self) -> float:
        return self.delta / (2 * self.walks)

    @property
    def shape(self) -> TreeShape:
        return TreeShape.for_length(self.n)

    @property
    def digest_delta(self) -> int:
        """6(d+1) * C * k^2, capped at the number of tree nodes per side
        (beyond which the digest can hold every possible difference)."""
        shape = self.shape
        raw = 6 * (shape.depth + 1) * self.c_walk * self.k * self.k
        return min(raw, 2 * (2 * shape.m - 1))

    def walk_record_bytes(self) -> int:
        # l01 word plus the digest: header (delta, ncells, salts, tag) and
        # 60 bytes per cell.
        return 4 + 40 + cell_count_for(self.digest_delta) * 60


@dataclass
class FullSketch:
    params: ProtocolParams
    walks: list[WalkSketch]

    _HEADER = struct.Struct("<4sHQIdI")

    def to_bytes(self) -> bytes:
        p = self.params
        head = self._HEADER.pack(MAGIC, VERSION, p.n, p.k, p.delta, p.walks)
        head += int(p.seed).to_bytes(16, "little")
        body = b"".join(
            len(rec := w.to_bytes()).to_bytes(4, "little") + rec for w in self.walks
        )
        return head + body

    @classmethod
    def from_bytes(cls, raw: bytes, c_walk: int = 2) -> "FullSketch":
        magic, version, n, k, delta, tau = cls._HEADER.unpack_from(raw, 0)
        if magic != MAGIC:
            raise ValueError("not a sketch file")
        if version != VERSION:
            raise ValueError(f"unsupported sketch version {version}")
        off = cls._HEADER.size
        seed = int.from_bytes(raw[off:off + 16], "little")
        off += 16
        walks = []
        for _ in range(tau):
            ln = int.from_bytes(raw[off:off + 4], "little")
            off += 4
            walks.append(WalkSketch.from_bytes(raw[off:off + ln]))
            off += ln
        params = ProtocolParams(n, k, delta, seed, tau=tau, c_walk=c_walk)
        return cls(params, walks)

    def header_tuple(self):
        p = self.params
        return (p.n, p.k, p.delta, p.walks, p.seed)


@dataclass(frozen=True)
class Result:
    distance: int
    script: EditScript


@dataclass(frozen=True)
class ErrorReport:
    reason: str


Verdict = Union[Result, ErrorReport]


class CombineConflict(Exception):
    """Mutually inconsistent alignments; treated as decode corruption."""


def encode_party(s: InputString, params: ProtocolParams) -> FullSketch:
    if s.n != params.n:
        raise ValueError(f"string length {s.n} does not match n={params.n}")
    shape = params.shape
    delta = params.digest_delta
    walks = [
        encode_walk(s, params.seed, i, shape, delta)
        for i in range(params.walks)
    ]
    return FullSketch(params, walks)


def referee_decode(sx: FullSketch, sy: FullSketch) -> Verdict:
    if sx.header_tuple() != sy.header_tuple():
        raise ValueError("sketch headers do not match")
    params = sx.params
    shape = params.shape
    alignments = []
    for wx, wy in zip(sx.walks, sy.walks):
        al = decode_walk(wx, wy, params.n, shape, params.digest_delta)
        if al is not None:
            alignments.append(al)
    if not alignments:
        return ErrorReport("no walk decoded")
    try:
        distance, script = combine_alignments(alignments, params.n, params.k)
    except CombineConflict as exc:
        return ErrorReport(f"inconsistent alignments: {exc}")
    if distance > params.k:
        return ErrorReport(f"edit script needs {distance} > k edits")
    return Result(distance, script)


# ---------------------------------------------------------------------------
# Combining alignments


def combine_alignments(alignments: list[EffectiveAlignment], n: int,
                       k: int) -> tuple[int, EditScript]:
    """Minimum edit script consistent with everything the alignments say.

    Equalities claimed by any alignment merge positions into classes;
    characters claimed by any alignment label the classes; edges claimed
    by every alignment are forced matches. The script is computed by a
    banded DP over the class-labelled strings and is valid whenever the
    alignments are mutually consistent."""
    if not alignments:
        raise ValueError("need at least one alignment")
    parent = kernel.uf_build(2 * n)
    for al in alignments:
        kernel.uf_union_runs(parent, al.run_xs - 1, al.run_ys - 1, al.run_lens, n)
    roots = kernel.uf_roots(parent)

    known = np.full(2 * n, -1, dtype=np.int64)
    for al in alignments:
        for p, c in al.chars_x.items():
            _claim(known, roots[p - 1], c)
        for q, c in al.chars_y.items():
            _claim(known, roots[n + q - 1], c)

    # Labels: concrete character when known, otherwise the class id moved
    # into a disjoint namespace.
    root_x = roots[:n]
    root_y = roots[n:]
    label_x = np.where(known[root_x] >= 0, known[root_x], root_x + (1 << 40))
    label_y = np.where(known[root_y] >= 0, known[root_y], root_y + (1 << 40))
    y_known = (known[root_y] >= 0).astype(np.uint8)

    forced = _common_edges(alignments, n)
    band = 2 * k + 1
    total = 0
    col_ops = []
    prev_x, prev_y = 0, 0
    for (fx, fy) in forced + [(n + 1, n + 1)]:
        if fx <= n and roots[fx - 1] != roots[n + fy - 1]:
            raise CombineConflict("forced edge endpoints in different classes")
        seg_x = label_x[prev_x:fx - 1]
        seg_y = label_y[prev_y:fy - 1]
        dist, moves = kernel.banded_dp(seg_x, seg_y, band,
                                       y_known[prev_y:fy - 1],
                                       y_known[prev_y:fy - 1])
        if moves is None or dist >= kernel.DP_INF:
            raise CombineConflict("no feasible alignment inside the band")
        ops = traceback_ops(moves, band, len(seg_x), len(seg_y),
                            lambda j: int(known[root_y[prev_y + j - 1]]))
        col_ops.extend(
            (x_idx + prev_x, kind, sym) for (x_idx, kind, sym) in ops
        )
        total += dist
        prev_x, prev_y = fx, fy
        if total > k + band:  # nothing to gain past the report threshold
            break
    script = column_ops_to_script(col_ops)
    return total, script


def _claim(known: np.ndarray, root: int, c: int) -> None:
    if known[root] == -1:
        known[root] = c
    elif known[root] != c:
        raise CombineConflict("two characters claimed for one class")


def _common_edges(alignments: list[EffectiveAlignment], n: int) -> list[tuple[int, int]]:
    """Strictly increasing edges present in every alignment."""
    sets = None
    for al in alignments:
        enc_parts = []
        for x0, y0, ln in zip(al.run_xs, al.run_ys, al.run_lens):
            base = int(x0) * (n + 2) + int(y0)
            enc_parts.append(base + np.arange(int(ln), dtype=np.int64) * (n + 3))
        enc = np.concatenate(enc_parts) if enc_parts else np.empty(0, dtype=np.int64)
        sets = enc if sets is None else np.intersect1d(sets, enc, assume_unique=False)
        if sets.size == 0:
            return []
    sets.sort()
    out = []
    last_x = last_y = 0
    for v in sets.tolist():
        fx, fy = divmod(int(v), n + 2)
        if fx > last_x and fy > last_y:
            out.append((fx, fy))
            last_x, last_y = fx, fy
    return out
