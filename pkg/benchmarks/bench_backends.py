"""Compare the compiled kernel against the pure-Python fallback on the
hot paths. Both backends are bit-identical; only speed differs.

Run: python benchmarks/bench_backends.py [--n N] [--k K]
"""

import argparse
import time

import numpy as np

import edsketch._ckernel as ck
import edsketch._pykernel as pk
from edsketch._mix import derive_key, PURPOSE_WALK
from edsketch.recovery import SketchSalts, cell_count_for
from edsketch.rolling_hash import HashParams
from edsketch.walk_sketch import TreeShape


def timed(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--k", type=int, default=8)
    args = ap.parse_args()
    n, k = args.n, args.k

    rng = np.random.default_rng(1)
    s = rng.integers(0, 4, size=n, dtype=np.int64)
    shape = TreeShape.for_length(n)
    delta = min(6 * (shape.depth + 1) * 2 * k * k, 2 * (2 * shape.m - 1))
    ncells = cell_count_for(delta)
    seed = 12345
    salts = SketchSalts.for_walk(seed, 0)
    hp = HashParams.for_walk(seed, 0)
    wkey = derive_key(seed, 0, PURPOSE_WALK)

    rows = []

    def bench(name, c_fn, p_fn, check=lambda a, b: a == b):
        tc, rc = timed(c_fn)
        tp, rp = timed(p_fn, repeat=1)
        assert check(rc, rp), f"backend mismatch in {name}"
        rows.append((name, tc, tp, tp / tc))

    bench(
        "walk_outputs",
        lambda: ck.walk_outputs(s, n, wkey, 3 * n),
        lambda: pk.walk_outputs(s, n, wkey, 3 * n),
        check=lambda a, b: np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]),
    )

    def encode_with(mod):
        cells = mod.cells_build(ncells)
        return mod.encode_walk_cells(s, n, shape.m, shape.depth, wkey, hp.base,
                                     salts.cell, salts.checksum, salts.tag,
                                     cells), cells

    bench(
        "encode_walk_cells",
        lambda: encode_with(ck),
        lambda: encode_with(pk),
        check=lambda a, b: a[0] == b[0] and np.array_equal(a[1], b[1]),
    )

    limbs = rng.integers(0, 1 << 48, size=(delta // 2, 3), dtype=np.int64)
    table = pk.cells_build(ncells)
    pk.iblt_insert_keys(table, salts.cell, salts.checksum, salts.tag, limbs)

    def peel_with(mod):
        return mod.iblt_peel(table.copy(), salts.cell, salts.checksum, delta)

    bench(
        "iblt_peel",
        lambda: peel_with(ck),
        lambda: peel_with(pk),
        check=lambda a, b: a[0] == b[0] and np.array_equal(a[1], b[1])
        and np.array_equal(a[2], b[2]),
    )

    xl = rng.integers(0, 4, size=n, dtype=np.int64)
    yl = xl.copy()
    yl[rng.choice(n, size=k, replace=False)] += 10
    ones = np.ones(n, dtype=np.uint8)
    band = 2 * k + 1

    bench(
        "banded_dp",
        lambda: ck.banded_dp(xl, yl, band, ones, ones),
        lambda: pk.banded_dp(xl, yl, band, ones, ones),
        check=lambda a, b: a[0] == b[0] and np.array_equal(a[1], b[1]),
    )

    print(f"n={n} k={k} delta={delta} cells={ncells}  (best of 3; pure: 1 run)")
    print(f"{'kernel':<20}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for name, tc, tp, ratio in rows:
        print(f"{name:<20}{tc * 1e3:>10.2f}ms{tp * 1e3:>10.2f}ms{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
