import numpy as np
import pytest

from edsketch.strings import InputString
from edsketch.walk import (
    WalkRandomness,
    pair_progress,
    passes_through,
    preimage_of_segment,
    walk_pair,
    walk_single,
)


def test_always_advance():
    s = InputString([4, 5, 6, 7])
    out, cur = walk_single(s, lambda t, c: 1, 8)
    # cursor moves one past per step; reads beyond n give the pad 0
    assert list(out) == [4, 5, 6, 7, 0, 0, 0, 0]
    assert list(cur) == list(range(1, 10))


def test_never_advance():
    s = InputString([4, 5, 6])
    out, cur = walk_single(s, lambda t, c: 0, 5)
    assert list(out) == [4] * 5
    assert list(cur) == [1] * 6


def test_prf_walk_matches_reference():
    s = InputString([1, 2, 1, 3, 2, 2, 1, 3])
    rnd = WalkRandomness(12345, 2)
    out_k, cur_k = walk_single(s, rnd, 24)
    out_r, cur_r = walk_single(s, rnd.bit, 24)
    assert np.array_equal(out_k, out_r)
    assert np.array_equal(cur_k, cur_r)


def test_identical_strings_stay_coupled():
    s = InputString([1, 2, 3, 1, 2, 3, 1, 2])
    trace = walk_pair(s, s, WalkRandomness(7), 24)
    assert np.array_equal(trace.outputs_x, trace.outputs_y)
    assert np.array_equal(trace.cursors_x, trace.cursors_y)
    assert trace.progress_count == 0


def test_progress_counts_mismatched_outputs():
    x = InputString([1, 1, 1, 1])
    y = InputString([1, 1, 2, 1])
    trace = walk_pair(x, y, WalkRandomness(11), 12)
    flags = trace.progress_flags
    assert trace.progress_count == int(np.count_nonzero(flags))
    diff = trace.outputs_x != trace.outputs_y
    assert np.array_equal(flags.astype(bool), diff)


def test_preimage_of_segment():
    # bit == t % 2: advance on odd steps only
    s = InputString([1, 2, 3, 4])
    out, cur = walk_single(s, lambda t, c: t % 2, 8)
    lo, hi, ln, left, right = preimage_of_segment(1, 8, cur)
    assert (lo, hi, ln) == (int(cur[0]), int(cur[7]), int(cur[7]) - int(cur[0]) + 1)
    assert left == 0  # no step before the range
    lo2, hi2, ln2, left2, right2 = preimage_of_segment(2, 3, cur)
    assert lo2 == int(cur[1]) and hi2 == int(cur[2])
    # step 2 does not advance (bit=0), so position 2 shares its cursor
    assert left2 == int(cur[0] == cur[1])
    with pytest.raises(ValueError):
        preimage_of_segment(0, 3, cur)
    with pytest.raises(ValueError):
        preimage_of_segment(3, 9, cur)


def test_pair_progress_matches_trace():
    x = InputString([1, 2, 3, 1, 2, 3, 2, 1])
    y = InputString([1, 2, 1, 1, 2, 3, 2, 2])
    rnd = WalkRandomness(99, 1)
    m = 24
    trace = walk_pair(x, y, rnd, m)
    prog, p_end, q_end, hit = pair_progress(x, y, rnd, m, state=(3, 3))
    assert prog == trace.progress_count
    assert p_end == int(trace.cursors_x[-1])
    assert q_end == int(trace.cursors_y[-1])
    assert bool(hit) == passes_through(trace, (3, 3))


def test_dump_csv(tmp_path):
    s = InputString([1, 2, 3])
    trace = walk_pair(s, s, WalkRandomness(1), 6)
    path = tmp_path / "trace.csv"
    trace.dump_csv(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 7  # header + one row per step
