"""Coupled random walks over one or two strings with shared randomness.

Each walk step reads the symbol under the cursor, emits it, and advances
the cursor by a keyed coin flip on (step, symbol). Two strings walked
under the same key stay coupled wherever they read equal symbols.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._kernel import kernel
from ._mix import PURPOSE_WALK, derive_key, prf_bit
from .strings import InputString


@dataclass(frozen=True)
class WalkRandomness:
    """Derives the per-step coin flips r(step, symbol) for one walk."""

    seed: int
    walk_index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 128:
            raise ValueError("seed is a 128-bit value")
        if self.walk_index < 0:
            raise ValueError("walk_index is non-negative")

    @property
    def walk_key(self) -> int:
        return derive_key(self.seed, self.walk_index, PURPOSE_WALK)

    def bit(self, step: int, symbol: int) -> int:
        return prf_bit(self.walk_key, step, symbol)


@dataclass(frozen=True)
class WalkParams:
    n: int
    m: Optional[int] = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("walk needs at least one step")

    @property
    def steps(self) -> int:
        return self.m if self.m is not None else 3 * self.n


@dataclass
class WalkTrace:
    """Full state record of a coupled walk pair."""

    outputs_x: np.ndarray
    outputs_y: np.ndarray
    cursors_x: np.ndarray
    cursors_y: np.ndarray

    @property
    def m(self) -> int:
        return len(self.outputs_x)

    @property
    def progress_flags(self) -> np.ndarray:
        return self.outputs_x != self.outputs_y

    @property
    def progress_count(self) -> int:
        return int(np.count_nonzero(self.progress_flags))

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "p", "q", "out_x", "out_y", "progress"])
            flags = self.progress_flags
            for t in range(self.m):
                w.writerow([
                    t + 1,
                    int(self.cursors_x[t]),
                    int(self.cursors_y[t]),
                    int(self.outputs_x[t]),
                    int(self.outputs_y[t]),
                    int(flags[t]),
                ])


BitFunction = Callable[[int, int], int]


def _walk_single_py(s: InputString, bit: BitFunction, m: int):
    """Reference walk driven by an arbitrary bit function; the kernel path
    below must agree with this on PRF bits."""
    out = np.zeros(m, dtype=np.int64)
    cur = np.zeros(m + 1, dtype=np.int64)
    p = 1
    for t in range(1, m + 1):
        cur[t - 1] = p
        c = s.at(p)
        out[t - 1] = c
        p += bit(t, c)
    cur[m] = p
    return out, cur


def walk_single(s: InputString, rnd: WalkRandomness | BitFunction, m: int):
    """One walk of m steps; returns (output, cursors) with cursors[t] the
    pointer at the start of step t+1."""
    if isinstance(rnd, WalkRandomness):
        return kernel.walk_outputs(s.symbols, s.n, rnd.walk_key, m)
    return _walk_single_py(s, rnd, m)


def walk_pair(x: InputString, y: InputString, rnd: WalkRandomness | BitFunction,
              m: int) -> WalkTrace:
    """Two coupled walks sharing the same randomness."""
    ox, cx = walk_single(x, rnd, m)
    oy, cy = walk_single(y, rnd, m)
    return WalkTrace(ox, oy, cx, cy)


def preimage_of_segment(a: int, b: int, cursors: np.ndarray):
    """Pre-image of the output range [a..b]: (lo, hi, len, left, right).

    left / right flag whether the boundary cursor equals its neighbour
    outside the range (0 when that neighbour does not exist)."""
    m = len(cursors) - 1
    if not 1 <= a <= b <= m:
        raise ValueError(f"range [{a}..{b}] outside [1..{m}]")
    lo = int(cursors[a - 1])
    hi = int(cursors[b - 1])
    left = int(a > 1 and cursors[a - 2] == lo)
    right = int(b < m and cursors[b] == hi)
    return lo, hi, hi - lo + 1, left, right


def passes_through(trace: WalkTrace, state: tuple[int, int]) -> bool:
    u, v = state
    return bool(np.any((trace.cursors_x == u) & (trace.cursors_y == v)))


def pair_progress(x: InputString, y: InputString, rnd: WalkRandomness, m: int,
                  state: Optional[tuple[int, int]] = None):
    """Streaming stats without a stored trace: (progress, p_end, q_end, hit)."""
    u, v = state if state is not None else (0, 0)
    return kernel.pair_stats(x.symbols, x.n, y.symbols, y.n, rnd.walk_key, m, u, v)
