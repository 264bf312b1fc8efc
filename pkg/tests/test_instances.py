import numpy as np
import pytest

from edsketch import instances
from edsketch.strings import apply_script, edit_distance


def test_random_string_bounds():
    rng = np.random.default_rng(0)
    s = instances.random_string(500, 4, rng)
    assert len(s) == 500
    assert s.symbols.min() >= 0 and s.symbols.max() < 4


def test_random_edits_planted_script():
    rng = np.random.default_rng(1)
    for k in (1, 2, 4, 8):
        pair = instances.random_edits(200, 4, k, rng)
        assert len(pair.planted) == k
        assert apply_script(pair.x, pair.planted) == pair.y
        d, _ = edit_distance(pair.x, pair.y)
        assert 0 < d <= k


def test_independent_pair():
    rng = np.random.default_rng(2)
    pair = instances.independent(300, 4, rng)
    d, _ = edit_distance(pair.x, pair.y)
    assert d > 30  # far apart with overwhelming probability


def test_periodic_adversarial_shape():
    for k in (2, 4, 8):
        pair = instances.periodic_adversarial(k)
        assert len(pair.x) == len(pair.y) == 5 * k
        assert pair.alphabet_size == k + 2
        d, _ = edit_distance(pair.x, pair.y)
        assert d <= 2 * k


def test_periodic_adversarial_k2_frozen():
    pair = instances.periodic_adversarial(2)
    assert list(pair.x.symbols) == [0, 3, 1, 3, 2, 2, 2, 2, 0, 3]
    assert list(pair.y.symbols) == [1, 3, 2, 2, 2, 2, 0, 3, 1, 3]
    d, _ = edit_distance(pair.x, pair.y)
    assert d == 4


def test_hamming_reduction_binary():
    rng = np.random.default_rng(3)
    for b in (2, 3, 4):
        bx = rng.integers(0, 2, size=6)
        by = rng.integers(0, 2, size=6)
        pair = instances.hamming_reduction_binary(bx, by, b)
        ham = int(np.count_nonzero(bx != by))
        assert pair.ground_truth == 2 * ham
        d, _ = edit_distance(pair.x, pair.y)
        assert d == 2 * ham


def test_hamming_reduction_large():
    rng = np.random.default_rng(4)
    bx = rng.integers(0, 2, size=12)
    by = rng.integers(0, 2, size=12)
    pair = instances.hamming_reduction_large(bx, by)
    ham = int(np.count_nonzero(bx != by))
    assert pair.ground_truth == ham
    d, _ = edit_distance(pair.x, pair.y)
    assert d == ham


def test_self_similar_structure():
    s = instances.self_similar(64, 4, singletons=6)
    assert len(s) == 64
    # singleton symbols are unique and outside the periodic alphabet
    special = s.symbols[s.symbols >= 4]
    assert len(special) == 6
    assert len(set(special.tolist())) == 6
    # the rest follows i mod period
    plain = np.flatnonzero(s.symbols < 4)
    assert np.array_equal(s.symbols[plain], plain % 4)


def test_binary_gadget_rejects_degenerate_width():
    with pytest.raises(ValueError):
        instances.hamming_reduction_binary([0, 1], [1, 0], 1)


def test_self_similar_validation():
    with pytest.raises(ValueError):
        instances.self_similar(8, 0)
    with pytest.raises(ValueError):
        instances.self_similar(8, 2, singletons=5)


def test_stable_zone_instance():
    rng = np.random.default_rng(5)
    inst = instances.stable_zone_instance(6, 9, 20, 10, 4, rng)
    assert inst.offset == 6 - 9
    assert len(inst.x) == 6 + 20 + 10
    assert len(inst.y) == 9 + 20 + 10
    # the shared zone and suffix are identical...
    assert np.array_equal(inst.x.symbols[6:], inst.y.symbols[9:])
    # ...and cannot be extended one step to the left
    assert inst.x.at(6) != inst.y.at(9)
