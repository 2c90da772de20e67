from __future__ import annotations

import pytest
from hypothesis import given, settings

from slimgraph import config, corpus
from slimgraph.codec import (Archive, Codebook, _star_fast, assemble, build_tree, classify_leaf_occurrence,
                             code_bits, decode, decode_bytes, decode_labeled, encode, encode_base,
                             leaf_threshold, part_target)
from slimgraph.errors import CodebookError, DecodeError, HeaderError, TruncatedError
from slimgraph.graph import build_graph

from .oracles import same_graph
from .strategies import graphs


def test_leaf_threshold_values():
    assert [leaf_threshold(n) for n in (2, 16, 256, 2 ** 16, 2 ** 17)] == [3, 3, 3, 4, 5]


def test_part_target_grows_with_log_squared():
    assert part_target(2 ** 10, 4) == 200
    assert part_target(5, 4) == 18


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=60))
def test_round_trip_random_graphs(g):
    data = encode(g).to_bytes()
    assert same_graph(decode_bytes(data), g)


@pytest.mark.parametrize("kind", ["tree", "grid", "maximal-planar", "degenerate-3"])
@pytest.mark.parametrize("n", [1, 2, 5, 17, 300, 2000])
def test_round_trip_corpus(kind, n):
    g = corpus.generate(kind, n, seed=n, colors=4 if n % 2 else 0)
    assert same_graph(decode(Archive.from_bytes(encode(g).to_bytes())), g)


def test_empty_graph():
    g = build_graph(0, [])
    assert decode_bytes(encode(g).to_bytes()).n == 0


def test_tree_leaves_are_small_and_children_shrink():
    g = corpus.generate("grid", 4096)
    tree = build_tree(g)
    for node in tree.nodes():
        if node.leaf:
            assert node.k <= tree.ell
        else:
            assert all(c.k < node.k for c in node.children)
            assert sorted(v for p in node.parts for v in p) == list(range(node.k))


def test_labels_decode_to_the_relabelled_graph():
    g = corpus.generate("maximal-planar", 500, seed=2)
    a = encode(g)
    lab = a.sidecar
    lg = decode_labeled(a)
    assert {(lab[u] - 1, lab[v] - 1) for u, v in g.arcs()} == set(lg.arcs())


def test_flat_nodes_store_everything_in_u0():
    tree = build_tree(corpus.generate("grid", 1024))
    flat = [n for n in tree.nodes() if not n.leaf and not n.children]
    assert flat and all(n.parts == [list(range(n.k))] for n in flat)


def test_identical_leaves_share_one_codebook_entry():
    g = corpus.generate("grid", 1024)
    enc = encode_base(g, deep=True)
    leaves = [n for n in enc.tree.nodes() if n.leaf]
    assert 0 < len(enc.codebook.entries()) < len(leaves)
    assert all(enc.codebook.code_of(n.key) == n.code for n in leaves)
    assert enc.codebook.star and enc.codebook.plain
    assert same_graph(decode_bytes(assemble(enc).to_bytes()), g)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=60))
def test_round_trip_deep_mode(g):
    assert same_graph(decode_bytes(encode(g, deep=True).to_bytes()), g)


def test_codebook_serialization_round_trip():
    enc = encode_base(corpus.generate("degenerate-3", 800, seed=1, colors=3), deep=True)
    book = enc.codebook
    back = Codebook.parse(enc.chi, 0, len(enc.chi))
    assert (back.star, back.plain, back.cw, back.symmetric) == (book.star, book.plain, book.cw, book.symmetric)


def test_codebook_lookup_errors():
    enc = encode_base(corpus.generate("tree", 200), deep=True)
    book = enc.codebook
    with pytest.raises(CodebookError):
        book.lookup(code_bits(1, len(book.plain) + 5))
    padded = code_bits(0, 1)
    with pytest.raises(CodebookError):
        book.lookup(padded.__class__.from_str("0" + "01"))


def test_code_bits_layout():
    assert str(code_bits(0, 0)) == "00"
    assert str(code_bits(1, 5)) == "1101"


def test_header_errors():
    data = encode(corpus.generate("tree", 50)).to_bytes()
    with pytest.raises(HeaderError):
        Archive.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(HeaderError):
        Archive.from_bytes(data[:4] + bytes([9]) + data[5:])
    with pytest.raises(TruncatedError):
        Archive.from_bytes(data[:-3])
    with pytest.raises(DecodeError):
        decode_bytes(data[:20])


def test_header_layout():
    data = encode(corpus.generate("tree", 50)).to_bytes()
    assert data[:4] == config.MAGIC and data[4] == config.VERSION
    assert int.from_bytes(data[5:13], "big") == 50


def test_sections_are_appended_without_touching_earlier_bytes():
    g = corpus.generate("grid", 400)
    enc = encode_base(g)
    from slimgraph.query import build_sections

    base = assemble(enc, build_sections(enc, ["deg", "lbl"]))
    more = assemble(enc, build_sections(enc, ["deg", "lbl", "adj"]))
    for tag in ("DEG", "LBL"):
        p1, l1 = base.section(tag)
        p2, l2 = more.section(tag)
        assert base.container.slice(p1, l1).to_bits().tolist() == more.container.slice(p2, l2).to_bits().tolist()
    assert base.part_bits(1).to_bits().tolist() == more.part_bits(1).to_bits().tolist()
    assert base.part_bits(2).to_bits().tolist() == more.part_bits(2).to_bits().tolist()
    assert more.section_tags() == ["DEG", "LBL", "ADJ"]


def test_exact_tags():
    a = encode(corpus.generate("tree", 100), ["deg", "adj", "nr3"])
    assert a.section_tags() == ["DEG", "ADJ", "NR3"]


@pytest.mark.parametrize("kind", ["tree", "grid", "maximal-planar"])
def test_fast_leaf_classification_matches_definition(kind):
    g = corpus.generate(kind, 600, seed=2)
    tree = build_tree(g, deep=True)
    checked = 0
    for parent in tree.nodes():
        for i, child in enumerate(parent.children, 1):
            if not child.leaf:
                continue
            U = [parent.verts[x] for x in parent.parts[i]]
            assert _star_fast(g, child, U) == classify_leaf_occurrence(g, child.graph, U)
            checked += 1
    assert checked
