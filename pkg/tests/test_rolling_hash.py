import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edsketch.rolling_hash import (
    PRIME,
    HashParams,
    SegmentHash,
    hash_combine,
    hash_extend,
    hash_string,
)

PARAMS = HashParams(PRIME, 31337)
symbols = st.lists(st.integers(0, 1 << 32), max_size=20)


def test_single_char_is_identity():
    for c in (0, 1, 7, (1 << 32) - 1):
        h = hash_extend(SegmentHash.empty(PARAMS), c)
        assert h.value == c
        assert h.length == 1


def test_extend_rejects_out_of_field():
    with pytest.raises(ValueError):
        hash_extend(SegmentHash.empty(PARAMS), PRIME)
    with pytest.raises(ValueError):
        hash_extend(SegmentHash.empty(PARAMS), -1)


def test_known_polynomial():
    h = hash_string([2, 3], PARAMS)
    assert h.value == (2 + 3 * PARAMS.base) % PRIME
    assert h.length == 2


@settings(max_examples=100, deadline=None)
@given(symbols, symbols)
def test_combine_is_concatenation(a, b):
    left = hash_string(a, PARAMS)
    right = hash_string(b, PARAMS)
    joined = hash_combine(left, right)
    assert joined == hash_string(a + b, PARAMS)


@settings(max_examples=50, deadline=None)
@given(symbols, symbols, symbols)
def test_combine_associative(a, b, c):
    ha, hb, hc = (hash_string(v, PARAMS) for v in (a, b, c))
    assert hash_combine(hash_combine(ha, hb), hc) == hash_combine(ha, hash_combine(hb, hc))


def test_combine_rejects_mixed_params():
    other = HashParams(PRIME, 101)
    with pytest.raises(ValueError):
        hash_combine(hash_string([1], PARAMS), hash_string([1], other))


def test_per_walk_bases_differ():
    seen = {HashParams.for_walk(5, i).base for i in range(16)}
    assert len(seen) == 16
    for b in seen:
        assert 2 <= b <= PRIME - 2
