"""Instance generators: random pairs with planted edits, adversarial
periodic pairs, Hamming-to-edit reductions, and self-similar strings.

Everything is deterministic in the supplied seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .strings import EditOp, EditScript, InputString, OpKind, apply_script

GENERATORS = (
    "random_edits",
    "independent",
    "periodic_adversarial",
    "hamming_reduction_binary",
    "hamming_reduction_large",
    "self_similar",
)


@dataclass(frozen=True)
class InstancePair:
    x: InputString
    y: InputString
    alphabet_size: int
    ground_truth: Optional[int] = None  # distance when known
    planted: Optional[EditScript] = None


def random_string(n: int, sigma: int, rng: np.random.Generator) -> InputString:
    return InputString(rng.integers(0, sigma, size=n, dtype=np.int64))


def random_edits(n: int, sigma: int, k: int,
                 rng: np.random.Generator) -> InstancePair:
    """Plant k edits on a random string, keeping the length at n via a
    balanced mix of substitutions, deletions, and insertions.

    The planted script bounds the distance: ed(x, y) <= k. The exact
    value can fall below k if edits cancel, so ground_truth is left to
    the oracle."""
    if k > n:
        raise ValueError("cannot plant more edits than positions")
    x = random_string(n, sigma, rng)
    buf = list(x.symbols)
    ops = []
    n_del = k // 4
    n_sub = k - 2 * n_del
    for _ in range(n_del):
        i = int(rng.integers(len(buf)))
        del buf[i]
        ops.append(EditOp(OpKind.DELETE, i + 1))
        j = int(rng.integers(len(buf) + 1))
        sym = int(rng.integers(sigma))
        buf.insert(j, sym)
        ops.append(EditOp(OpKind.INSERT, j + 1, sym))
    for _ in range(n_sub):
        i = int(rng.integers(len(buf)))
        sym = (buf[i] + 1 + int(rng.integers(sigma - 1))) % sigma
        buf[i] = sym
        ops.append(EditOp(OpKind.SUBSTITUTE, i + 1, sym))
    y = InputString(np.array(buf, dtype=np.int64))
    script = EditScript(tuple(ops))
    assert apply_script(x, script) == y
    return InstancePair(x, y, sigma, planted=script)


def independent(n: int, sigma: int, rng: np.random.Generator) -> InstancePair:
    return InstancePair(random_string(n, sigma, rng),
                        random_string(n, sigma, rng), sigma)


def periodic_adversarial(k: int) -> InstancePair:
    """Length-5k pair built from two interleaved period-k blocks around a
    2k run of a separator symbol; distance is at most 2k, but any script
    that keeps position k aligned to position k needs more than 2k edits.

    Symbols: 0 and 1 are the two block leads, 2 the separator, 3..k+1 the
    shared block tail."""
    if k < 1:
        raise ValueError("k must be positive")
    a, b, d = 0, 1, 2
    tail = list(range(3, 3 + (k - 1)))
    block_a = [a] + tail
    block_b = [b] + tail
    sep = [d] * (2 * k)
    x = block_a + block_b + sep + block_a
    y = block_b + sep + block_a + block_b
    sigma = k + 2
    return InstancePair(InputString(np.array(x, dtype=np.int64)),
                        InputString(np.array(y, dtype=np.int64)), sigma)


def hamming_reduction_binary(bits_x: np.ndarray, bits_y: np.ndarray,
                             b: int) -> InstancePair:
    """Binary gadget encoding with ed(x, y) = 2 * Ham(X, Y).

    Each source bit becomes a 6b-symbol block; the two block variants are
    at edit distance exactly 2 and blocks never cross-align."""
    gx = _binary_gadget(bits_x, b)
    gy = _binary_gadget(bits_y, b)
    ham = int(np.count_nonzero(np.asarray(bits_x) != np.asarray(bits_y)))
    return InstancePair(gx, gy, 2, ground_truth=2 * ham)


def _binary_gadget(bits, b: int) -> InputString:
    if b < 2:
        # at b = 1 the two block variants coincide
        raise ValueError("gadget width must be at least 2")
    zero = [0] * b + [1] + [0] * (2 * b - 1) + [1] * (3 * b)
    one = [0] * (2 * b - 1) + [1] + [0] * b + [1] * (3 * b)
    out = []
    for v in np.asarray(bits):
        out.extend(one if v else zero)
    return InputString(np.array(out, dtype=np.int64))


def hamming_reduction_large(bits_x: np.ndarray,
                            bits_y: np.ndarray) -> InstancePair:
    """Positional encoding with ed(x, y) = Ham(X, Y): the i-th bit maps to
    symbol 2i - X_i, so differing positions share no symbol."""
    bx = np.asarray(bits_x, dtype=np.int64)
    by = np.asarray(bits_y, dtype=np.int64)
    if bx.shape != by.shape:
        raise ValueError("bit strings must have equal length")
    idx = 2 * np.arange(1, len(bx) + 1, dtype=np.int64)
    x = InputString(idx - bx)
    y = InputString(idx - by)
    ham = int(np.count_nonzero(bx != by))
    return InstancePair(x, y, int(idx[-1]) + 1 if len(bx) else 1,
                        ground_truth=ham)


def self_similar(big_l: int, period: int, singletons: int = 0) -> InputString:
    """Periodic string of length L (position i holds i mod period), with
    evenly spread positions overwritten by unique symbols.

    The string matches a copy of itself shifted by the period everywhere
    except at the singletons, so the unmatched mass is period + singletons."""
    if not 1 <= period <= big_l:
        raise ValueError("period must lie in [1..L]")
    if not 0 <= singletons <= big_l // 2:
        raise ValueError("too many singletons")
    out = np.arange(big_l, dtype=np.int64) % period
    if singletons:
        pos = np.linspace(0, big_l - 1, num=singletons, dtype=np.int64)
        out[pos] = period + np.arange(singletons, dtype=np.int64)
    return InputString(out)


@dataclass(frozen=True)
class StableZoneInstance:
    """A pair whose distinct prefixes are followed by a long shared block:
    x = Px W S, y = Py W S. The equal-substring zone starts right after
    the prefixes, so its first state is reached at (u_start, v_start)."""

    x: InputString
    y: InputString
    u_start: int
    v_start: int
    zone_len: int

    @property
    def offset(self) -> int:
        """u - v for every state (u, v) on the zone diagonal."""
        return self.u_start - self.v_start


def stable_zone_instance(prefix_x: int, prefix_y: int, zone_len: int,
                         suffix_len: int, sigma: int,
                         rng: np.random.Generator) -> StableZoneInstance:
    """Craft x = Px W S, y = Py W S with Px, Py forced to differ at their
    last character so the zone cannot extend left."""
    if min(prefix_x, prefix_y, zone_len) < 1 or sigma < 3:
        raise ValueError("need nonempty parts and at least 3 symbols")
    px = rng.integers(0, sigma, size=prefix_x, dtype=np.int64)
    py = rng.integers(0, sigma, size=prefix_y, dtype=np.int64)
    w = rng.integers(0, sigma, size=zone_len, dtype=np.int64)
    s = rng.integers(0, sigma, size=suffix_len, dtype=np.int64)
    # Distinct last prefix characters, both different from w[0].
    px[-1] = (int(w[0]) + 1) % sigma
    py[-1] = (int(w[0]) + 2) % sigma
    x = InputString(np.concatenate([px, w, s]))
    y = InputString(np.concatenate([py, w, s]))
    return StableZoneInstance(x, y, prefix_x + 1, prefix_y + 1, zone_len)
