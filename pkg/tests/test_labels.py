from __future__ import annotations

import pytest

from slimgraph import corpus
from slimgraph.codec import encode, encode_base, leaf_threshold
from slimgraph.labels import LabelIndex, child_vectors, y0_vector


def _index(archive):
    pos, ln = archive.section("LBL")
    return LabelIndex(archive.container, pos, ln, archive.n, leaf_threshold(archive.n))


@pytest.mark.parametrize("deep", [False, True])
@pytest.mark.parametrize("kind", ["tree", "grid", "maximal-planar", "degenerate-3"])
def test_resolve_then_lift_is_identity(kind, deep):
    a = encode(corpus.generate(kind, 700, seed=1), ["lbl"], deep=deep)
    idx = _index(a)
    for label in range(1, a.n + 1):
        path, ref, local = idx.resolve(label)
        assert 1 <= local <= ref[2]
        assert idx.lift_path(path, local) == label
        assert idx.lift_path(path, local, {}) == label


@pytest.mark.parametrize("kind", ["grid", "degenerate-3"])
def test_node_labels_are_permutations_and_blocks_follow_children(kind):
    enc = encode_base(corpus.generate(kind, 900, seed=4), deep=True)
    for node in enc.tree.nodes():
        assert sorted(node.labels) == list(range(1, node.k + 1))
        if node.leaf:
            continue
        u0 = node.parts[0]
        assert sorted(node.labels[u] for u in u0) == list(range(1, len(u0) + 1))
        y0 = y0_vector(node)
        assert sum(y0) == sum(1 for p in node.parts[1:] if p)
        for i, child in enumerate(node.children):
            y, table = child_vectors(node, i)
            assert len(y) == child.k and sum(y) == len(table)


def test_locate_and_lift_are_inverse_on_every_node():
    a = encode(corpus.generate("tree", 2000, seed=2), ["lbl"], deep=True)
    idx = _index(a)
    seen = 0
    stack = [idx.root]
    while stack:
        ref = stack.pop()
        nd = idx.node(ref)
        if nd is None:
            continue
        seen += 1
        for label in range(1, nd.k + 1):
            i, c = nd.locate(label)
            assert nd.lift(i, c) == label
        stack.extend(idx.child_ref(ref, nd, i) for i in range(1, nd.p + 1))
    assert seen > 1


def test_label_out_of_range():
    a = encode(corpus.generate("tree", 300), ["lbl"], deep=True)
    idx = _index(a)
    nd = idx.node(idx.root)
    with pytest.raises(IndexError):
        nd.locate(0)
    with pytest.raises(IndexError):
        nd.lift(nd.p + 1, 1)
