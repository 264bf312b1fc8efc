"""Streaming polynomial hashing of output segments.

f(z) = sum z_i * r^(i-1) mod p with a fixed 61-bit Mersenne prime, so a
single character hashes to itself and two segment hashes combine in O(1).
"""

from __future__ import annotations

from dataclasses import dataclass

from ._kernel import kernel
from ._mix import PURPOSE_HASH_BASE, derive_key

PRIME = kernel.P61


@dataclass(frozen=True)
class HashParams:
    prime: int
    base: int

    def __post_init__(self):
        if not 1 <= self.base < self.prime:
            raise ValueError("base must lie in [1..p-1]")

    @classmethod
    def for_walk(cls, seed: int, walk_index: int) -> "HashParams":
        """Per-walk base drawn from [2..p-2] off the shared seed."""
        base = 2 + derive_key(seed, walk_index, PURPOSE_HASH_BASE) % (PRIME - 3)
        return cls(PRIME, base)


@dataclass(frozen=True)
class SegmentHash:
    value: int
    length: int
    params: HashParams

    def __post_init__(self):
        if not 0 <= self.value < self.params.prime:
            raise ValueError("hash value outside the field")

    @classmethod
    def empty(cls, params: HashParams) -> "SegmentHash":
        return cls(0, 0, params)


def hash_extend(h: SegmentHash, c: int) -> SegmentHash:
    """Append one character; hashing a single character is the identity."""
    p = h.params.prime
    if not 0 <= c < p:
        raise ValueError("symbol outside the hash field; alphabet/params mismatch")
    value = (h.value + c * pow(h.params.base, h.length, p)) % p
    return SegmentHash(value, h.length + 1, h.params)


def hash_combine(left: SegmentHash, right: SegmentHash) -> SegmentHash:
    """Hash of the concatenation of the two hashed segments."""
    if left.params != right.params:
        raise ValueError("mixed hash parameters")
    p = left.params.prime
    value = (left.value + pow(left.params.base, left.length, p) * right.value) % p
    return SegmentHash(value, left.length + right.length, left.params)


def hash_string(symbols, params: HashParams) -> SegmentHash:
    h = SegmentHash.empty(params)
    for c in symbols:
        h = hash_extend(h, int(c))
    return h
