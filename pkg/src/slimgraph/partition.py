"""Balanced separators, connected clusterings (H-partitions) and star partitions.

All routines work on undirected adjacency lists (`Graph.und`) and return
plain sorted vertex lists.  Every result is checked against its contract
before it is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import config
from .errors import PartitionError
from .graph import Graph, components


@dataclass
class BalancedPartition:
    A: list[int]
    B: list[int]
    C: list[int]


@dataclass
class HPartition:
    parts: list[list[int]]
    part_of: list[int]
    quotient: list[list[int]]

    @property
    def m(self) -> int:
        return len(self.parts)


@dataclass
class StarPartition:
    V0: list[int]
    parts: list[list[int]]
    closed: list[list[int]] = field(default_factory=list)
    s3_sum: int = 0

    @property
    def p(self) -> int:
        return len(self.parts)


def is_balanced(adj, verts, bp: BalancedPartition) -> bool:
    m = len(verts)
    a, b, c = set(bp.A), set(bp.B), set(bp.C)
    if len(a) + len(b) + len(c) != m or (a | b | c) != set(verts):
        return False
    if 3 * max(len(a), len(b)) > 2 * m:
        return False
    return not any(w in b for v in a for w in adj[v])


def _bfs_layers(adj, root, allowed):
    seen = {root}
    layers = [[root]]
    parent = {root: None}
    while True:
        nxt = []
        for x in layers[-1]:
            for y in adj[x]:
                if y in allowed and y not in seen:
                    seen.add(y)
                    parent[y] = x
                    nxt.append(y)
        if not nxt:
            return layers, parent
        layers.append(nxt)


def _pack(sizes_items, a0=0, b0=0):
    """Largest-first packing of (size, items) groups into two bins."""
    A, B = [], []
    sa, sb = a0, b0
    for size, items in sorted(sizes_items, key=lambda t: (-t[0], t[1][0])):
        if sa <= sb:
            A.extend(items)
            sa += size
        else:
            B.extend(items)
            sb += size
    return A, B


def _balanced(adj, verts) -> BalancedPartition:
    m = len(verts)
    comps = components(adj, verts)
    big = max(comps, key=len)
    if 3 * len(big) <= 2 * m:
        A, B = _pack([(len(c), c) for c in comps])
        return BalancedPartition(sorted(A), sorted(B), [])
    rest = [v for c in comps if c is not big for v in c]
    bigset = set(big)
    # double sweep for a far root
    far = _bfs_layers(adj, min(big), bigset)[0][-1]
    layers, parent = _bfs_layers(adj, min(far), bigset)
    counts = [len(L) for L in layers]
    total = len(big)
    best = None
    below = 0
    for i, cnt in enumerate(counts):
        above = total - below - cnt
        small = min(below, above) + len(rest)
        large = max(below, above)
        if 3 * max(small, large) <= 2 * m and (best is None or cnt < counts[best]):
            best = i
        below += cnt
    candidate = None
    if best is not None:
        lo = sum(counts[:best])
        candidate = (counts[best], best, lo)
    if candidate is None or candidate[0] > 1:
        sep = _tree_centroid(layers, parent, total)
        parts = components(adj, [v for v in verts if v != sep])
        A, B = _pack([(len(c), c) for c in parts])
        if 3 * max(len(A), len(B)) <= 2 * m:
            return BalancedPartition(sorted(A), sorted(B), [sep])
    if candidate is None:
        if m <= 3:
            return BalancedPartition([], [], sorted(verts))
        raise PartitionError(f"no balanced separator found for {m} vertices")
    _, i, _ = candidate
    A = [v for L in layers[:i] for v in L]
    B = [v for L in layers[i + 1:] for v in L]
    if len(A) <= len(B):
        A += rest
    else:
        B += rest
    return BalancedPartition(sorted(A), sorted(B), sorted(layers[i]))


def _tree_centroid(layers, parent, total):
    """Vertex of the BFS tree whose removal leaves tree pieces of size <= total/2."""
    size = {}
    for L in reversed(layers):
        for v in L:
            size[v] = size.get(v, 0) + 1
            p = parent[v]
            if p is not None:
                size[p] = size.get(p, 0) + size[v]
    children = {}
    for L in layers[1:]:
        for v in L:
            children.setdefault(parent[v], []).append(v)
    v = layers[0][0]
    while True:
        heavy = max(children.get(v, []), key=lambda c: (size[c], -c), default=None)
        if heavy is None or 2 * size[heavy] <= total:
            return v
        v = heavy


def balanced_partition(h: Graph) -> BalancedPartition:
    """Separator C with nonadjacent sides A, B of at most 2m/3 vertices each."""
    if h.n < 1:
        raise PartitionError("balanced partition of an empty graph")
    verts = list(range(h.n))
    bp = _balanced(h.und, verts)
    if not is_balanced(h.und, verts, bp):
        raise PartitionError("balanced partition failed its contract check")
    return bp


def balanced_partition_of(adj, verts) -> BalancedPartition:
    bp = _balanced(adj, verts)
    if not is_balanced(adj, verts, bp):
        raise PartitionError("balanced partition failed its contract check")
    return bp


# H-partitions ----------------------------------------------------------------

def h_partition(g: Graph, m: int) -> HPartition:
    """Connected clusters of at most ceil(n/m) vertices grown bottom-up on a
    BFS spanning forest; the quotient graph records cluster adjacency."""
    n = g.n
    if not 1 <= m <= max(1, n):
        raise ValueError(f"target {m} outside 1..{n}")
    return _cluster(g.und, n, -(-n // m))


def _cluster(adj, n, cap) -> HPartition:
    parent = [-1] * n
    order = []
    seen = [False] * n
    roots = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        roots.append(s)
        head = len(order)
        order.append(s)
        while head < len(order):
            x = order[head]
            head += 1
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    order.append(y)
    pending = [1] * n
    top = [False] * n
    kids = [[] for _ in range(n)]
    for v in order:
        if parent[v] >= 0:
            kids[parent[v]].append(v)
    for v in reversed(order):
        total = 1
        for c in sorted(kids[v], key=lambda c: (pending[c], c)):
            if total + pending[c] <= cap:
                total += pending[c]
            else:
                top[c] = True
        pending[v] = total
    for r in roots:
        top[r] = True
    part_of = [-1] * n
    tops = sorted(v for v in range(n) if top[v])
    index = {v: i for i, v in enumerate(tops)}
    for v in order:
        part_of[v] = index[v] if top[v] else part_of[parent[v]]
    parts = [[] for _ in tops]
    for v in range(n):
        parts[part_of[v]].append(v)
    quotient = [set() for _ in tops]
    for u in range(n):
        pu = part_of[u]
        for w in adj[u]:
            pw = part_of[w]
            if pw != pu:
                quotient[pu].add(pw)
    return HPartition(parts, part_of, [sorted(q) for q in quotient])


def check_h_partition(g: Graph, hp: HPartition, m: int) -> dict:
    """H1 (part size), H2 (quotient adjacency), connectivity and coverage."""
    n = g.n
    cap = -(-n // m)
    adj = g.und
    covered = sorted(v for p in hp.parts for v in p) == list(range(n))
    h1 = all(len(p) <= cap for p in hp.parts)
    want = [set() for _ in hp.parts]
    for u in range(n):
        for w in adj[u]:
            if hp.part_of[u] != hp.part_of[w]:
                want[hp.part_of[u]].add(hp.part_of[w])
    h2 = all(set(q) == w for q, w in zip(hp.quotient, want))
    connected = all(len(components(adj, p)) == 1 for p in hp.parts)
    return {"covered": covered, "H1": h1, "H2": h2, "connected": connected, "parts": len(hp.parts), "cap": cap}


# star partitions -------------------------------------------------------------

def default_quotient_size(n: int) -> int:
    return max(1, -(-n // max(1, int(math.log2(n)) if n > 1 else 1)))


def default_degree_cap(n: int) -> int:
    return math.ceil(math.log2(n) ** 2) if n > 1 else 1


def s2_cap(n: int) -> float:
    return config.K_S2 * max(1.0, math.log2(max(n, 2))) ** 7


def star_partition(g: Graph, quotient_size=None, leaf_size=None, degree_cap=None) -> StarPartition:
    """Star partition V0, V1..Vp with pairwise nonadjacent parts.

    The defaults follow the size rules quotient = ceil(n / floor(log2 n)),
    b = ceil(log2(n)^2) and leaves of at most b*b quotient vertices.  The
    keyword overrides let callers ask for smaller parts.
    """
    n = g.n
    adj = g.und
    if n == 0:
        return StarPartition([], [])
    if n < 16 and quotient_size is None and leaf_size is None:
        everything = list(range(n))
        if n <= s2_cap(n):
            return _finish(adj, [], [everything])
        return _finish(adj, everything, [])
    b = default_degree_cap(n) if degree_cap is None else degree_cap
    mq = default_quotient_size(n) if quotient_size is None else quotient_size
    quota = b * b if leaf_size is None else leaf_size
    mq = min(max(1, mq), n)
    if mq == n:
        part_of = list(range(n))
        groups = [[v] for v in range(n)]
        qadj = adj
    else:
        hp = _cluster(adj, n, -(-n // mq))
        part_of, groups, qadj = hp.part_of, hp.parts, hp.quotient
    leaves = _split(qadj, list(range(len(groups))), quota)
    hits = [0] * len(groups)
    home = [-1] * len(groups)
    for i, leaf in enumerate(leaves):
        for x in leaf:
            hits[x] += 1
            home[x] = i
    parts = [[] for _ in leaves]
    V0 = []
    for v in range(n):
        x = part_of[v]
        if hits[x] == 1 and len(adj[v]) <= b:
            parts[home[x]].append(v)
        else:
            V0.append(v)
    return _finish(adj, V0, [p for p in parts if p])


def _split(qadj, piece, quota):
    """Recursive balanced splitting of the quotient into leaves of <= quota nodes."""
    leaves = []
    stack = [piece]
    while stack:
        cur = stack.pop()
        if len(cur) <= quota:
            leaves.append(cur)
            continue
        bp = balanced_partition_of(qadj, cur)
        if not bp.A or not bp.B:
            leaves.append(cur)
            continue
        # B side pushed first so the A side is emitted first
        stack.append(sorted(bp.B + bp.C))
        stack.append(sorted(bp.A + bp.C))
    return leaves


def _finish(adj, V0, parts) -> StarPartition:
    closed = []
    s3 = len(V0) + len(parts)
    for p in parts:
        inside = set(p)
        nb = {w for v in p for w in adj[v]} - inside
        closed.append(sorted(inside | nb))
        s3 += len(nb)
    return StarPartition(sorted(V0), [sorted(p) for p in parts], closed, s3)


def check_star(g: Graph, sp: StarPartition) -> dict:
    """S1 exactly, S2 against the calibrated cap, and the S3 sum."""
    adj = g.und
    n = g.n
    owner = [-1] * n
    for i, p in enumerate(sp.parts):
        for v in p:
            owner[v] = i
    covered = sorted(sp.V0 + [v for p in sp.parts for v in p]) == list(range(n))
    s1 = all(owner[w] in (-1, owner[v]) for v in range(n) if owner[v] >= 0 for w in adj[v])
    biggest = max((len(c) for c in sp.closed), default=0)
    cap = s2_cap(n)
    return {
        "covered": covered,
        "S1": s1,
        "S2": biggest <= cap,
        "S2_max": biggest,
        "S2_cap": cap,
        "S3_sum": sp.s3_sum,
        "S3_ratio": sp.s3_sum / n if n else 0.0,
        "p": sp.p,
        "V0": len(sp.V0),
    }
