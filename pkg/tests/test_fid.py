from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slimgraph.bits import BitString
from slimgraph.fid import Dictionary, block_width, build_dict, dict_bits, size_report
from slimgraph.errors import FormatError

from .oracles import naive_rank, naive_select, naive_select_zero


def _check_all(y):
    d = build_dict(y)
    m, r = len(y), sum(y)
    assert (d.m, d.r) == (m, r)
    for i in range(1, m + 1):
        assert d.access(i) == y[i - 1]
        assert d.rank(i) == naive_rank(y, i)
        assert d.access_rank(i) == (y[i - 1], naive_rank(y, i))
    for j in range(1, r + 1):
        assert d.select(j) == naive_select(y, j)
    for j in range(1, m - r + 1):
        assert d.select_zero(j) == naive_select_zero(y, j)


@pytest.mark.parametrize("m", range(0, 11))
def test_every_string_up_to_ten_bits(m):
    for y in itertools.product((0, 1), repeat=m):
        _check_all(list(y))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=0, max_size=600))
def test_random_strings(y):
    _check_all(y)


@settings(max_examples=30, deadline=None)
@given(st.integers(200, 5000), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_vectorised_lookups_agree(m, density, seed):
    rng = np.random.default_rng(seed)
    y = (rng.random(m) < density).astype(np.uint8)
    d = build_dict(y)
    pos = np.arange(1, m + 1)
    ranks = np.cumsum(y)
    assert np.array_equal(d.rank_array(pos), ranks)
    assert np.array_equal(d.access_array(pos), y)
    ones = np.flatnonzero(y) + 1
    zeros = np.flatnonzero(y == 0) + 1
    if ones.size:
        assert np.array_equal(d.select_array(np.arange(1, ones.size + 1)), ones)
    if zeros.size:
        assert np.array_equal(d.select_zero_array(np.arange(1, zeros.size + 1)), zeros)
    for i in rng.integers(1, m + 1, 50):
        assert d.rank(int(i)) == int(ranks[i - 1])


def test_block_width():
    assert [block_width(m) for m in (1, 2, 4, 5, 16, 17, 1 << 20)] == [1, 1, 1, 2, 2, 3, 10]


def test_short_strings_are_verbatim():
    d = build_dict("101")
    assert d.verbatim and d.container.p == 2
    assert build_dict("1010").container.p == 10


def test_out_of_range_positions():
    d = build_dict("0110100")
    with pytest.raises(IndexError):
        d.rank(0)
    with pytest.raises(IndexError):
        d.select(4)
    with pytest.raises(IndexError):
        d.select_zero(5)


def test_reads_from_inside_a_larger_string():
    body = dict_bits("110010111000")
    whole = BitString.concat([BitString.from_str("111"), body, BitString.from_str("0")])
    d = Dictionary(whole, 3, len(body))
    assert [d.rank(i) for i in range(1, 13)] == list(np.cumsum([1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 0]))


def test_header_damage_is_reported():
    body = dict_bits("1100101110001")
    raw = str(body)
    # ten-part container forced to claim two parts
    pc_b = raw.index("1") + 1
    tampered = raw[:pc_b] + format(2, f"0{pc_b}b") + raw[2 * pc_b:]
    with pytest.raises(FormatError):
        Dictionary(BitString.from_str(tampered))


def test_size_report_adds_up():
    d = build_dict(np.random.default_rng(1).integers(0, 2, 3000))
    rep = size_report(d)
    assert sum(v for k, v in rep.items() if k != "container") + rep["container"] == d.size_bits
