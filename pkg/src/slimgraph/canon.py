"""Canonical forms of tiny colored graphs by trying every vertex order."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .bits import BitString, BitWriter
from .errors import GraphError
from .graph import Graph


@lru_cache(maxsize=None)
def _perms(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.int64).reshape(-1, k)


@lru_cache(maxsize=None)
def _offdiag(k: int) -> np.ndarray:
    return ~np.eye(k, dtype=bool)


def color_width(colors) -> int:
    if not colors:
        return 0
    return max(1, max(colors).bit_length())


def _matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.uint8)
    for u, v in g.arcs():
        a[u, v] = 1
    return a


_cache: dict = {}


def canonical_order(g: Graph, cw: int) -> tuple[tuple, list[int]]:
    """(key, order) where order[i] is the vertex placed at position i.

    The key is the lexicographically least (arc matrix, colors) bit row over
    all k! orders; equal keys mean color-preserving isomorphic graphs.
    """
    k = g.n
    a = _matrix(g)
    cols = tuple(g.colors) if g.colors is not None else ()
    ck = (k, cw, a.tobytes(), cols)
    hit = _cache.get(ck)
    if hit is not None:
        return hit
    if k == 0:
        res = ((0, ()), [])
        _cache[ck] = res
        return res
    P = _perms(k)
    mats = a[P[:, :, None], P[:, None, :]][:, _offdiag(k)]
    rows = [mats]
    if cw:
        c = np.asarray(cols, dtype=np.int64)[P]
        shifts = np.arange(cw - 1, -1, -1)
        rows.append(((c[:, :, None] >> shifts) & 1).reshape(len(P), -1).astype(np.uint8))
    arr = np.concatenate(rows, axis=1)
    cand = np.arange(len(P))
    for col in range(arr.shape[1]):
        vals = arr[cand, col]
        lo = vals.min()
        cand = cand[vals == lo]
        if len(cand) == 1:
            break
    best = int(cand[0])
    key = (k, tuple(int(x) for x in arr[best]))
    res = (key, [int(x) for x in P[best]])
    if len(_cache) > 200_000:
        _cache.clear()
    _cache[ck] = res
    return res


def canonicalize(g: Graph, limit: int, cw: int | None = None) -> BitString:
    """Canonical bit string of a graph with at most `limit` vertices."""
    if g.n > limit:
        raise GraphError(f"{g.n} vertices exceed the canonicalization limit {limit}")
    if cw is None:
        cw = color_width(g.colors)
    key, _ = canonical_order(g, cw)
    return key_bits(key)


def key_bits(key) -> BitString:
    k, row = key
    w = BitWriter()
    w.write_gamma(k + 1)
    w.write_bits(np.asarray(row, dtype=np.uint8))
    return w.finish()


def graph_from_key(key, cw: int) -> tuple[list[list[int]], list[int] | None]:
    """Out-lists and colors of the canonical representative (labels 0..k-1)."""
    k, row = key
    out = [[] for _ in range(k)]
    pos = 0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if row[pos]:
                out[i].append(j)
            pos += 1
    colors = None
    if cw:
        colors = []
        for i in range(k):
            c = 0
            for _ in range(cw):
                c = (c << 1) | row[pos]
                pos += 1
            colors.append(c)
    return out, colors
