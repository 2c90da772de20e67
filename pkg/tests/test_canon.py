from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from slimgraph.canon import canonical_order, canonicalize, color_width, graph_from_key, key_bits
from slimgraph.errors import GraphError
from slimgraph.graph import Graph, build_graph

from .oracles import to_nx
from .strategies import graphs


def _relabel(g, perm):
    arcs = [(perm[u], perm[v]) for u, v in g.arcs()]
    colors = None
    if g.colors is not None:
        colors = [0] * g.n
        for v, c in enumerate(g.colors):
            colors[perm[v]] = c
    return build_graph(g.n, arcs, colors)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6, max_deg=5), st.randoms(use_true_random=False))
def test_relabelled_copies_share_a_key(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    cw = color_width(g.colors)
    assert canonical_order(g, cw)[0] == canonical_order(_relabel(g, perm), cw)[0]


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6, max_deg=5))
def test_key_rebuilds_an_isomorphic_graph(g):
    cw = color_width(g.colors)
    key, order = canonical_order(g, cw)
    out, colors = graph_from_key(key, cw)
    h = Graph(key[0], out, colors)
    assert nx.is_isomorphic(to_nx(g), to_nx(h))
    # order[i] is the vertex of g placed at position i
    assert {(order[a], order[b]) for a, b in h.arcs()} == set(g.arcs())
    if g.colors is not None:
        assert [g.colors[order[i]] for i in range(g.n)] == colors


def test_keys_separate_every_four_vertex_digraph_class():
    n = 4
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    keys = {}
    for mask in range(1 << len(pairs)):
        arcs = [p for i, p in enumerate(pairs) if mask >> i & 1]
        g = build_graph(n, arcs)
        keys.setdefault(canonical_order(g, 0)[0], g)
    # number of unlabelled digraphs on four vertices
    assert len(keys) == 218
    reps = list(keys.values())
    rng = random.Random(0)
    for a, b in rng.sample(list(itertools.combinations(reps, 2)), 300):
        assert not nx.is_isomorphic(to_nx(a), to_nx(b))


def test_colors_split_otherwise_equal_graphs():
    a = build_graph(2, [(0, 1)], colors=[0, 1], undirected=True)
    b = build_graph(2, [(0, 1)], colors=[1, 1], undirected=True)
    assert canonicalize(a, 8) != canonicalize(b, 8)


def test_limit_is_enforced():
    with pytest.raises(GraphError):
        canonicalize(build_graph(5, []), 4)


def test_key_bits_layout():
    g = build_graph(2, [(0, 1)])
    assert str(key_bits(canonical_order(g, 0)[0])) == "011" + "01"
