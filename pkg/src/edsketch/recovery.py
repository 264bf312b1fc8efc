"""Linear sketch of 6-tuple sets with exact symmetric-difference decoding.

An invertible Bloom table variant: every key lands in three cells (one
per third of the table); a cell stores a signed count, per-limb linear
and square sums mod p, and an xor checksum. The square sums let the
decoder resolve stuck two-key cells algebraically, and a global tag over
the whole multiset guards against silently wrong output.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ._kernel import kernel
from ._mix import PURPOSE_CELLS, PURPOSE_CHECKSUM, PURPOSE_TAG, derive_key
from ._pykernel import CK_MASK, LIMB_MASK

P61 = kernel.P61
KEY_BYTES = 18  # 144-bit canonical serialization


class Fail:
    """Decoder overload verdict; a value, not an exception."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Fail"


FAIL = Fail()


@dataclass(frozen=True, order=True)
class TupleKey:
    depth: int
    index: int
    h: int
    length: int
    alpha: int
    beta: int

    def __post_init__(self):
        if not (0 <= self.depth < 1 << 8 and 0 <= self.index < 1 << 32
                and 0 <= self.h < 1 << 64 and 0 <= self.length < 1 << 32
                and self.alpha in (0, 1) and self.beta in (0, 1)):
            raise ValueError("tuple field out of range")

    def to_limbs(self) -> tuple[int, int, int]:
        return kernel.pack_node_key(self.depth, self.index, self.h,
                                    self.length, self.alpha, self.beta)

    @classmethod
    def from_limbs(cls, l0: int, l1: int, l2: int):
        parts = kernel.unpack_node_key(l0, l1, l2)
        if parts is None:
            return None
        return cls(*parts)

    def to_bytes(self) -> bytes:
        v = 0
        for shift, limb in zip((0, 48, 96), self.to_limbs()):
            v |= limb << shift
        return v.to_bytes(KEY_BYTES, "little")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "TupleKey":
        if len(raw) != KEY_BYTES:
            raise ValueError(f"expected {KEY_BYTES} bytes")
        v = int.from_bytes(raw, "little")
        key = cls.from_limbs(v & LIMB_MASK, (v >> 48) & LIMB_MASK, (v >> 96) & LIMB_MASK)
        if key is None:
            raise ValueError("padding bits set")
        return key


def cell_count_for(delta: int) -> int:
    """Table size: ceil(1.4*delta) + 8, rounded up to a multiple of 3 so
    each of the three hash regions has equal size."""
    base = -(-14 * delta // 10) + 8
    return 3 * (-(-base // 3))


@dataclass(frozen=True)
class SketchSalts:
    cell: int
    checksum: int
    tag: int

    @classmethod
    def for_walk(cls, seed: int, walk_index: int) -> "SketchSalts":
        return cls(
            derive_key(seed, walk_index, PURPOSE_CELLS),
            derive_key(seed, walk_index, PURPOSE_CHECKSUM),
            derive_key(seed, walk_index, PURPOSE_TAG),
        )


class DiffSketch:
    """Cells plus a verify tag; subtraction yields the sketch of the
    signed symmetric difference."""

    __slots__ = ("delta", "salts", "cells", "tag")

    def __init__(self, delta: int, salts: SketchSalts, cells=None, tag: int = 0):
        if delta < 1:
            raise ValueError("delta must be positive")
        self.delta = delta
        self.salts = salts
        self.cells = kernel.cells_build(cell_count_for(delta)) if cells is None else cells
        self.tag = tag

    @property
    def ncells(self) -> int:
        return len(self.cells)

    def insert_limbs(self, limbs: np.ndarray) -> None:
        add = kernel.iblt_insert_keys(self.cells, self.salts.cell,
                                      self.salts.checksum, self.salts.tag, limbs)
        self.tag = (self.tag + add) % P61

    def insert(self, key: TupleKey) -> None:
        self.insert_limbs(np.array([key.to_limbs()], dtype=np.int64))

    def subtract(self, other: "DiffSketch") -> "DiffSketch":
        if (self.delta != other.delta or self.salts != other.salts
                or self.ncells != other.ncells):
            raise ValueError("sketch parameter mismatch")
        diff = np.empty_like(self.cells)
        diff[:, 0] = self.cells[:, 0] - other.cells[:, 0]
        diff[:, 1:7] = (self.cells[:, 1:7] - other.cells[:, 1:7]) % P61
        diff[:, 7] = self.cells[:, 7] ^ other.cells[:, 7]
        return DiffSketch(self.delta, self.salts, diff, (self.tag - other.tag) % P61)

    # -- decoding ----------------------------------------------------------

    def decode(self, delta: int | None = None):
        """Recover the signed difference as [(TupleKey, sign)], or FAIL.

        Valid on a subtraction result; succeeds exactly when the table
        peels down to all-zero and the verify tag matches."""
        delta = self.delta if delta is None else delta
        ok, limbs, signs = kernel.iblt_peel(self.cells.copy(), self.salts.cell,
                                            self.salts.checksum, delta)
        if not ok:
            return FAIL
        tag = 0
        out = []
        for (l0, l1, l2), sign in zip(limbs.tolist(), signs.tolist()):
            term = kernel.tag_term(l0, l1, l2, self.salts.tag)
            tag = (tag + sign * term) % P61
            key = TupleKey.from_limbs(l0, l1, l2)
            if key is None:
                return FAIL
            out.append((key, sign))
        if tag != self.tag:
            return FAIL
        return out

    # -- serialization -----------------------------------------------------

    _HEADER = struct.Struct("<IIQQQQ")

    def to_bytes(self) -> bytes:
        head = self._HEADER.pack(self.delta, self.ncells, self.salts.cell,
                                 self.salts.checksum, self.salts.tag, self.tag)
        counts = np.ascontiguousarray(self.cells[:, 0], dtype=np.int32).tobytes()
        rest = np.ascontiguousarray(self.cells[:, 1:8], dtype=np.uint64).tobytes()
        return head + counts + rest

    @classmethod
    def from_bytes(cls, raw: bytes) -> "DiffSketch":
        delta, ncells, s_cell, s_ck, s_tag, tag = cls._HEADER.unpack_from(raw, 0)
        off = cls._HEADER.size
        counts = np.frombuffer(raw, dtype=np.int32, count=ncells, offset=off)
        off += 4 * ncells
        rest = np.frombuffer(raw, dtype=np.uint64, count=7 * ncells, offset=off)
        cells = np.empty((ncells, 8), dtype=np.int64)
        cells[:, 0] = counts
        cells[:, 1:8] = rest.reshape(ncells, 7).astype(np.int64)
        return cls(delta, SketchSalts(s_cell, s_ck, s_tag), cells, tag)

    def byte_size(self) -> int:
        return self._HEADER.size + self.ncells * 60


def sketch_insert(sk: DiffSketch, key: TupleKey) -> None:
    sk.insert(key)


def sketch_subtract(sa: DiffSketch, sb: DiffSketch) -> DiffSketch:
    return sa.subtract(sb)


def sketch_decode(diff: DiffSketch, delta: int | None = None):
    return diff.decode(delta)
