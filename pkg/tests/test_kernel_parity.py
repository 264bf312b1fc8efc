"""The compiled kernel and the pure-Python fallback must be bit-identical
on every exported function, including mutated buffers."""

import os
import subprocess
import sys

import numpy as np
import pytest

import edsketch
import edsketch._pykernel as pk
from edsketch._mix import PURPOSE_WALK, derive_key
from edsketch.recovery import SketchSalts, cell_count_for
from edsketch.rolling_hash import HashParams
from edsketch.walk_sketch import TreeShape

ck = pytest.importorskip("edsketch._ckernel")

SEED = 0xC0FFEE
RNG = np.random.default_rng(7)


def keys(idx):
    return derive_key(SEED, idx, PURPOSE_WALK)


def test_backend_names():
    assert pk.BACKEND == "python"
    assert ck.BACKEND == "c"
    assert edsketch.BACKEND in ("python", "c")


def test_pure_env_forces_fallback():
    code = "import edsketch; print(edsketch.BACKEND)"
    env = dict(os.environ, EDSKETCH_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_walk_outputs_parity():
    for trial in range(6):
        n = int(RNG.integers(4, 200))
        s = RNG.integers(0, 5, size=n, dtype=np.int64)
        m = 3 * n
        oc, cc = ck.walk_outputs(s, n, keys(trial), m)
        op, cp = pk.walk_outputs(s, n, keys(trial), m)
        assert np.array_equal(oc, op)
        assert np.array_equal(cc, cp)


def test_pair_stats_parity():
    for trial in range(6):
        n = int(RNG.integers(8, 128))
        x = RNG.integers(0, 4, size=n, dtype=np.int64)
        y = x.copy()
        y[RNG.integers(0, n)] += 1
        args = (x, n, y, n, keys(100 + trial), 3 * n, 2, 2)
        assert ck.pair_stats(*args) == pk.pair_stats(*args)


def test_selfsim_and_zone_and_gambler_parity():
    s = np.array([i % 4 for i in range(64)], dtype=np.int64)
    for trial in range(6):
        k = keys(200 + trial)
        assert (ck.selfsim_miss(s, 64, k, 3, 1, 500)
                == pk.selfsim_miss(s, 64, k, 3, 1, 500))
        x = RNG.integers(0, 3, size=48, dtype=np.int64)
        y = RNG.integers(0, 3, size=48, dtype=np.int64)
        assert (ck.zone_entry(x, 48, y, 48, k, 20, 18, 400)
                == pk.zone_entry(x, 48, y, 48, k, 20, 18, 400))
        assert ck.gambler_walk(k, 3, 5, 2000) == pk.gambler_walk(k, 3, 5, 2000)


def test_node_key_packing_parity():
    for trial in range(20):
        parts = (int(RNG.integers(0, 1 << 8)), int(RNG.integers(0, 1 << 32)),
                 int(RNG.integers(0, 1 << 32)) << 32 | int(RNG.integers(0, 1 << 32)),
                 int(RNG.integers(0, 1 << 32)),
                 int(RNG.integers(0, 2)), int(RNG.integers(0, 2)))
        limbs_c = ck.pack_node_key(*parts)
        limbs_p = pk.pack_node_key(*parts)
        assert limbs_c == limbs_p
        assert ck.unpack_node_key(*limbs_c) == pk.unpack_node_key(*limbs_p) == parts


def test_encode_walk_cells_parity():
    n = 96
    s = RNG.integers(0, 4, size=n, dtype=np.int64)
    shape = TreeShape.for_length(n)
    salts = SketchSalts.for_walk(SEED, 0)
    hp = HashParams.for_walk(SEED, 0)
    delta = 120
    args = (s, n, shape.m, shape.depth, keys(0), hp.base,
            salts.cell, salts.checksum, salts.tag)
    cells_c = ck.cells_build(cell_count_for(delta))
    cells_p = pk.cells_build(cell_count_for(delta))
    tag_c = ck.encode_walk_cells(*args, cells_c)
    tag_p = pk.encode_walk_cells(*args, cells_p)
    assert tag_c == tag_p
    assert np.array_equal(cells_c, cells_p)


def _random_table(delta, nkeys, rng, salts):
    limbs = rng.integers(0, 1 << 48, size=(nkeys, 3), dtype=np.int64)
    cells = pk.cells_build(cell_count_for(delta))
    pk.iblt_insert_keys(cells, salts.cell, salts.checksum, salts.tag, limbs)
    return cells


def test_iblt_peel_parity():
    salts = SketchSalts.for_walk(SEED, 3)
    for trial in range(12):
        delta = int(RNG.integers(8, 120))
        # include overloaded tables so the FAIL path is compared too
        nkeys = int(RNG.integers(1, 3 * delta))
        table = _random_table(delta, nkeys, RNG, salts)
        tc = table.copy()
        tp = table.copy()
        ok_c, limbs_c, signs_c = ck.iblt_peel(tc, salts.cell, salts.checksum, delta)
        ok_p, limbs_p, signs_p = pk.iblt_peel(tp, salts.cell, salts.checksum, delta)
        assert ok_c == ok_p
        assert np.array_equal(limbs_c, limbs_p)
        assert np.array_equal(signs_c, signs_p)
        assert np.array_equal(tc, tp)


def test_union_find_parity():
    n = 40
    xs = RNG.integers(1, n, size=5, dtype=np.int64)
    ys = RNG.integers(1, n, size=5, dtype=np.int64)
    lens = RNG.integers(1, 5, size=5, dtype=np.int64)
    pc = ck.uf_build(2 * n)
    pp = pk.uf_build(2 * n)
    ck.uf_union_runs(pc, xs - 1, ys - 1, lens, n)
    pk.uf_union_runs(pp, xs - 1, ys - 1, lens, n)
    assert np.array_equal(ck.uf_roots(pc), pk.uf_roots(pp))


def test_banded_dp_parity():
    for trial in range(8):
        lx = int(RNG.integers(1, 60))
        ly = int(RNG.integers(max(1, lx - 4), lx + 4))
        xl = RNG.integers(0, 3, size=lx, dtype=np.int64)
        yl = RNG.integers(0, 3, size=ly, dtype=np.int64)
        ok = RNG.integers(0, 2, size=ly, dtype=np.uint8)
        dc, mc = ck.banded_dp(xl, yl, 9, ok, ok)
        dp_, mp_ = pk.banded_dp(xl, yl, 9, ok, ok)
        assert dc == dp_
        if mc is None or mp_ is None:
            assert mc is None and mp_ is None
        else:
            assert np.array_equal(np.asarray(mc), np.asarray(mp_))
