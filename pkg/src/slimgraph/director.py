"""t-directors: bounded out-degree orientations along which every pair at
distance at most t is joined by a shortest path that runs forward from u
and backward into v.

t_director starts from the peeling orientation (a 1-director) and applies
`enhance` t-1 times.  combine_directors assembles a director for an internal
decomposition-tree node from the directors of its children and a fresh
director of the node graph, keeping only a few out-edges from the latter.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import config
from .graph import Graph, Orientation, bounded_bfs, greedy_color_adj, peel_orientation, peeling_order


@dataclass
class Director:
    d: Orientation
    t: int
    audit: list = field(default_factory=list)   # per enhancement: [|E| added at j=1..]

    @property
    def cap(self) -> int:
        return self.d.cap


def _forward(g: Graph, d: Orientation) -> list[list[int]]:
    """Adjacency of G ∩ D."""
    if g.is_symmetric():
        return d.out
    return [[b for b in d.out[a] if g.has_arc(a, b)] for a in range(g.n)]


def _backward(g: Graph, d: Orientation) -> list[list[int]]:
    """From b, the vertices a with a->b in G and b->a in D (G ∩ D^r walked backwards)."""
    if g.is_symmetric():
        return d.out
    return [[a for a in d.out[b] if g.has_arc(a, b)] for b in range(g.n)]


def is_directive(g: Graph, d: Orientation, u: int, v: int, fwd=None, bwd=None) -> bool:
    """Some w has d_{G∩D}(u,w) + d_{G∩D^r}(w,v) = d_G(u,v)."""
    if u == v:
        return True
    dist = bounded_bfs(g, u, g.n)
    if v not in dist:
        return False
    dg = dist[v]
    a = bounded_bfs(g, u, dg, fwd if fwd is not None else _forward(g, d))
    b = bounded_bfs(g, v, dg, bwd if bwd is not None else _backward(g, d))
    return any(a[w] + b[w] == dg for w in a if w in b)


def _add_arcs(d: Orientation, arcs) -> int:
    return sum(d.add(a, b) for a, b in arcs)


class _Balls:
    """Memoized bounded BFS balls in G, used for exact distance tests."""

    def __init__(self, g: Graph, radius: int):
        self.g = g
        self.radius = radius
        self.memo: dict[int, dict] = {}

    def within(self, u: int, v: int, r: int) -> bool:
        ball = self.memo.get(u)
        if ball is None:
            ball = bounded_bfs(self.g, u, self.radius)
            self.memo[u] = ball
        return ball.get(v, r + 1) <= r


def pivoted_pairs(g: Graph, d: Orientation, dj: Orientation, j: int, balls: _Balls | None = None) -> dict:
    """Pairs (u, v) at distance j+1 joined by a path u,x,...,y,v whose first
    arc u->x runs against D (x->u in D), whose remaining arcs lie in D, and
    whose arcs between x and y are in both directions of dj.

    Returns {(u, v): path} with the first path found in order of x, then
    depth-first along out-lists.
    """
    if balls is None:
        balls = _Balls(g, j)
    fwd = _forward(g, d)
    sets = dj.sets()
    found: dict = {}
    for x in range(g.n):
        us = [u for u in d.out[x] if g.has_arc(u, x)]
        if not us:
            continue
        for path in _walks(x, j, fwd, sets):
            v = path[-1]
            for u in us:
                if u == v or (u, v) in found or u in path:
                    continue
                if balls.within(u, v, j):
                    continue
                found[(u, v)] = [u] + path
    return found


def _walks(x: int, j: int, fwd, sets):
    """Walks x=p1..p_{j+1} along fwd whose first j-1 steps are two-way in dj."""
    stack = [[x]]
    while stack:
        path = stack.pop()
        steps = len(path) - 1
        if steps == j:
            yield path
            continue
        a = path[-1]
        last = steps == j - 1
        nxt = []
        for b in fwd[a]:
            if b in path:
                continue
            if not last and not (b in sets[a] and a in sets[b]):
                continue
            nxt.append(path + [b])
        stack.extend(reversed(nxt))


def _power_adjacency(dj: Orientation, verts: list[int], radius: int) -> list[list[int]]:
    """Undirected adjacency over `verts` of dj^radius (dj-distance 1..radius)."""
    index = {v: i for i, v in enumerate(verts)}
    adj = [set() for _ in verts]
    for i, v in enumerate(verts):
        for w, dist in bounded_bfs(None, v, radius, dj.out).items():
            k = index.get(w)
            if k is not None and 0 < dist and k != i:
                adj[i].add(k)
                adj[k].add(i)
    return [sorted(a) for a in adj]


@dataclass
class PivotOrientation:
    d: Orientation
    classes: dict      # class key -> list of pairs
    color: dict        # pivot vertex -> color


def orient_pivot_graph(g: Graph, dj: Orientation, j: int, pairs: dict) -> PivotOrientation:
    """Orient the pivot-pair graph class by class.

    Pivots x are colored properly in dj^(2j-1) restricted to pivots; arcs
    with the same pivot are spread over classes by their rank at that pivot,
    so within a class pivots are distinct and pairwise far apart.  Each class
    is oriented by peeling.
    """
    n = g.n
    out = [[] for _ in range(n)]
    if not pairs:
        return PivotOrientation(Orientation(n, out), {}, {})
    pivots = sorted({p[1] for p in pairs.values()})
    adj = _power_adjacency(dj, pivots, 2 * j - 1)
    col = greedy_color_adj(adj)
    color = {x: col[i] for i, x in enumerate(pivots)}
    rank: dict = {}
    classes: dict = {}
    for uv, p in pairs.items():
        x = p[1]
        r = rank.get(x, 0)
        rank[x] = r + 1
        classes.setdefault((color[x], r), []).append(uv)
    seen = set()
    for key in sorted(classes):
        edges = classes[key]
        verts = sorted({w for e in edges for w in e})
        local = {w: i for i, w in enumerate(verts)}
        nb = [[] for _ in verts]
        for u, v in edges:
            a, b = local[u], local[v]
            if b not in nb[a]:
                nb[a].append(b)
                nb[b].append(a)
        pos = [0] * len(verts)
        for i, v in enumerate(peeling_order(nb)):
            pos[v] = i
        for a, heads in enumerate(nb):
            for b in heads:
                if pos[b] > pos[a]:
                    arc = (verts[a], verts[b])
                    if arc not in seen:
                        seen.add(arc)
                        out[arc[0]].append(arc[1])
    return PivotOrientation(Orientation(n, out), classes, color)


def check_pivot_classes(dj: Orientation, j: int, po: PivotOrientation, pairs: dict) -> bool:
    """Within each class, pivots are distinct and pairwise non-adjacent in dj^(2j-1)."""
    for edges in po.classes.values():
        xs = [pairs[e][1] for e in edges]
        if len(set(xs)) != len(xs):
            return False
        adj = _power_adjacency(dj, xs, 2 * j - 1)
        if any(adj):
            return False
    return True


def enhance(g: Graph, director: Director) -> Director:
    """Turn a t-director into a (t+1)-director by adding enhancer arcs."""
    d = director.d
    t = director.t
    cur = d.copy()
    balls = _Balls(g, t)
    sizes = []
    for j in range(1, t + 1):
        pairs = pivoted_pairs(g, d, cur, j, balls)
        po = orient_pivot_graph(g, cur, j, pairs)
        extra = []
        for (u, v), p in pairs.items():
            if po.d.has(u, v):
                extra.append((u, p[1]))
            if po.d.has(v, u):
                extra.append((v, p[-2]))
        sizes.append(_add_arcs(cur, extra))
    return Director(cur, t + 1, director.audit + [sizes])


def t_director(g: Graph, t: int) -> Director:
    if t < 1:
        raise ValueError("t must be at least 1")
    director = Director(peel_orientation(g), 1)
    while director.t < t:
        director = enhance(g, director)
    return director


# validation -----------------------------------------------------------------

def directive_coverage(g: Graph, d: Orientation, t: int, limit: int = config.EXHAUSTIVE_LIMIT,
                       samples: int = config.SAMPLE_PAIRS, seed: int = 0) -> dict:
    """Per distance 1..t: (directive pairs, pairs checked).

    Every ordered pair is checked when n <= limit, otherwise `samples`
    random sources contribute all their targets within distance t.
    """
    n = g.n
    fwd = _forward(g, d)
    bwd = _backward(g, d)
    if n <= limit:
        sources = range(n)
    else:
        rng = random.Random(seed)
        sources = sorted(rng.sample(range(n), min(n, samples)))
    back = {}
    stats = {k: [0, 0] for k in range(1, t + 1)}
    for u in sources:
        ball = bounded_bfs(g, u, t)
        a = bounded_bfs(g, u, t, fwd)
        for v, dist in ball.items():
            if dist == 0:
                continue
            b = back.get(v)
            if b is None:
                b = bounded_bfs(g, v, t, bwd)
                back[v] = b
            ok = any(a[w] + b[w] == dist for w in a if w in b)
            stats[dist][1] += 1
            stats[dist][0] += ok
    return {k: tuple(v) for k, v in stats.items()}


def is_t_director(g: Graph, d: Orientation, t: int, **kw) -> bool:
    from .graph import validate_orientation

    if not validate_orientation(d, g):
        return False
    return all(ok == total for ok, total in directive_coverage(g, d, t, **kw).values())


# combining along the decomposition tree ---------------------------------------

@dataclass
class NodeDirector:
    d: Orientation          # director of the node graph, node-local ids
    w0: list[int]           # sorted local ids of W0
    fresh: Orientation      # the node's own director D'_H


def leaf_director(key, cw: int, t: int) -> Orientation:
    """Director of the canonical representative of a codebook entry."""
    from .canon import graph_from_key

    out, _ = graph_from_key(key, cw)
    return t_director(Graph(key[0], out), t).d


def combine_directors(node, children: list, t: int) -> NodeDirector:
    """D_H = D0 ∪ D1 ∪ ... ∪ Dp for an internal node.

    `children` holds each child's director (child-local ids).  Wi collects
    the vertices of Ui reachable within t steps of a child director from a
    copy of a U0 vertex; D0 keeps the out-edges of W0 = U0 ∪ W1 ∪ ... in a
    fresh director of the node graph, and Di the out-edges of Ui in the
    child director.
    """
    h = node.graph
    fresh = t_director(h, t).d
    w0 = set(node.parts[0])
    out = [[] for _ in range(h.n)]
    for i, cd in enumerate(children):
        local = node.maps[i]
        members = set(node.parts[i + 1])
        copies = [j for j, x in enumerate(local) if x not in members]
        reach = _multi_bfs(cd.out, copies, t)
        w0.update(local[j] for j in reach if local[j] in members)
        for j, x in enumerate(local):
            if x in members:
                out[x].extend(local[y] for y in cd.out[j])
    for u in w0:
        for v in fresh.out[u]:
            if v not in out[u]:
                out[u].append(v)
    return NodeDirector(Orientation(h.n, out), sorted(w0), fresh)


def _multi_bfs(adj, sources, radius):
    dist = {s: 0 for s in sources}
    frontier = list(sources)
    for r in range(1, radius + 1):
        nxt = []
        for a in frontier:
            for b in adj[a]:
                if b not in dist:
                    dist[b] = r
                    nxt.append(b)
        frontier = nxt
    return dist


def tree_directors(tree, t: int) -> dict:
    """NodeDirector (leaves: d only) for every tree node, keyed by id(node)."""
    result: dict = {}
    leaf_cache: dict = {}
    post = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        post.append(node)
        stack.extend(node.children)
    for node in reversed(post):
        if node.leaf:
            dc = leaf_cache.get(node.key)
            if dc is None:
                dc = leaf_director(node.key, tree.cw, t)
                leaf_cache[node.key] = dc
            out = [[] for _ in range(node.k)]
            for i, heads in enumerate(dc.out):
                out[node.order[i]] = [node.order[j] for j in heads]
            d = Orientation(node.k, out)
            result[id(node)] = NodeDirector(d, list(range(node.k)), d)
            continue
        kids = [result[id(c)].d for c in node.children]
        result[id(node)] = combine_directors(node, kids, t)
    return result


def near_bound(cap: int, t: int) -> int:
    """Upper bound on |W| for a near query: two D-balls of radius t."""
    return 2 * sum(cap ** i for i in range(t + 1))
