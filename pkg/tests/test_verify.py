from __future__ import annotations

import random

import pytest

from slimgraph import corpus
from slimgraph.codec import encode
from slimgraph.errors import DecodeError
from slimgraph.verify import run_checks, verify_archive


@pytest.mark.parametrize("kind", ["tree", "grid", "maximal-planar", "degenerate-3"])
def test_corpus_graphs_pass_every_check(kind):
    checks = run_checks(corpus.generate(kind, 150, seed=2, colors=2), samples=40)
    assert [c.name for c in checks if not c.passed] == []
    assert {"partition.star", "director.tree", "codec.roundtrip", "query.oracle"} <= {c.name for c in checks}


def test_injected_orientation_fault_is_named():
    checks = run_checks(corpus.generate("grid", 100), samples=10, inject="orientation")
    failed = [c.name for c in checks if not c.passed]
    # a dropped arc also leaves some pairs without a directive path
    assert failed[0] == "director.orientation" and set(failed) <= {"director.orientation", "director.directive"}


def test_unknown_injection():
    with pytest.raises(ValueError):
        run_checks(corpus.generate("tree", 20), inject="nothing")


@pytest.mark.parametrize("deep", [False, True])
def test_written_archives_are_canonical(deep):
    g = corpus.generate("maximal-planar", 80, seed=1, colors=3)
    for sections in ([], ["adj"], ["deg", "adj", "nr2", "lbl"]):
        check = verify_archive(encode(g, sections, deep=deep).to_bytes())
        assert check.passed, check.detail


def test_every_single_bit_flip_is_caught():
    g = corpus.generate("tree", 40, seed=3, colors=2)
    data = encode(g, ["deg", "adj", "nr3", "lbl"]).to_bytes()
    memo = {}
    rng = random.Random(0)
    for pos in rng.sample(range(len(data) * 8), 300):
        bad = bytearray(data)
        bad[pos // 8] ^= 1 << (7 - pos % 8)
        try:
            check = verify_archive(bytes(bad), memo)
        except DecodeError:
            continue
        assert not check.passed, pos
