"""Deterministic 64-bit mixing used for all derived randomness.

Every random choice in the library (walk coin flips, hash bases, digest
cell placement) is derived from a 128-bit seed through the same splitmix
finalizer, so identical seeds give bit-identical behaviour across the
compiled and pure-Python backends.
"""

MASK64 = (1 << 64) - 1

# Mixing multipliers (splitmix64 finalizer constants plus two odd salts).
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
PHI64 = 0x9E3779B97F4A7C15
SALT_C = 0xC2B2AE3D27D4EB4F

# Sub-key purposes, one stream per walk.
PURPOSE_WALK = 0
PURPOSE_HASH_BASE = 1
PURPOSE_CELLS = 2
PURPOSE_CHECKSUM = 3
PURPOSE_TAG = 4


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, walk_index: int, purpose: int) -> int:
    """64-bit sub-key for one (seed, walk, purpose) stream."""
    lo = seed & MASK64
    hi = (seed >> 64) & MASK64
    h = mix64(lo ^ mix64(hi ^ ((walk_index * PHI64 + purpose) & MASK64)))
    return mix64(h ^ (purpose * SALT_C))


def prf_bit(walk_key: int, step: int, symbol: int) -> int:
    """Coin flip r(step, symbol) in {0,1}, keyed per walk."""
    return mix64(walk_key ^ ((step * PHI64) & MASK64) ^ ((symbol * SALT_C) & MASK64)) & 1
