"""Directed simple graphs with optional vertex colors, and the primitive
operations used throughout the package (orientation by peeling, bounded BFS,
greedy coloring, neighborhoods)."""
from __future__ import annotations

import heapq
from collections import deque

from .errors import GraphError


class Graph:
    """Directed simple graph on vertices 0..n-1.

    `out[u]` is the ordered out-neighbor list of u.  `verts`, when set, maps
    each local vertex to its id in a host graph (subgraphs carry it).
    """

    __slots__ = ("n", "out", "colors", "hadwiger_bound", "undirected", "verts", "_in", "_und", "_sets")

    def __init__(self, n, out, colors=None, hadwiger_bound=None, undirected=False, verts=None):
        self.n = n
        self.out = out
        self.colors = colors
        self.hadwiger_bound = hadwiger_bound
        self.undirected = undirected
        self.verts = verts
        self._in = None
        self._und = None
        self._sets = None

    @property
    def num_arcs(self) -> int:
        return sum(len(a) for a in self.out)

    def arcs(self):
        for u, nbrs in enumerate(self.out):
            for v in nbrs:
                yield u, v

    def arc_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nbrs in enumerate(self.out) for v in nbrs}

    def has_arc(self, u: int, v: int) -> bool:
        if self._sets is None:
            self._sets = [set(a) for a in self.out]
        return v in self._sets[u]

    @property
    def inn(self) -> list[list[int]]:
        """In-neighbor lists."""
        if self._in is None:
            inn = [[] for _ in range(self.n)]
            for u, nbrs in enumerate(self.out):
                for v in nbrs:
                    inn[v].append(u)
            self._in = inn
        return self._in

    @property
    def und(self) -> list[list[int]]:
        """Sorted neighbor lists of the underlying undirected graph."""
        if self._und is None:
            if self.is_symmetric():
                self._und = [sorted(a) for a in self.out]
            else:
                inn = self.inn
                self._und = [sorted(set(self.out[u]).union(inn[u])) for u in range(self.n)]
        return self._und

    def is_symmetric(self) -> bool:
        if self.undirected:
            return True
        return all(self.has_arc(v, u) for u, v in self.arcs())

    def degree(self, u: int) -> int:
        return len(self.und[u])

    def host(self, u: int) -> int:
        return u if self.verts is None else self.verts[u]

    def host_arcs(self) -> set[tuple[int, int]]:
        h = self.host
        return {(h(u), h(v)) for u, v in self.arcs()}

    def same_as(self, other: "Graph") -> bool:
        """Equal vertex count, arc set and colors."""
        return (
            self.n == other.n
            and self.arc_set() == other.arc_set()
            and (self.colors or None) == (other.colors or None)
        )

    def __repr__(self) -> str:
        kind = "undirected" if self.undirected else "directed"
        return f"Graph(n={self.n}, arcs={self.num_arcs}, {kind})"


def build_graph(n: int, arc_list, colors=None, undirected: bool = False, hadwiger_bound=None) -> Graph:
    """Validate and build a Graph; undirected input is stored symmetrized."""
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    out = [[] for _ in range(n)]
    seen = set()
    for pair in arc_list:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"arc ({u},{v}): endpoint out of range for n={n}")
        if u == v:
            raise GraphError(f"arc ({u},{v}): self-loop")
        if (u, v) in seen or (undirected and (v, u) in seen):
            raise GraphError(f"arc ({u},{v}): duplicate")
        seen.add((u, v))
        out[u].append(v)
        if undirected:
            out[v].append(u)
    if colors is not None:
        colors = [int(c) for c in colors]
        if len(colors) != n:
            raise GraphError(f"{len(colors)} colors for {n} vertices")
        if any(c < 0 for c in colors):
            raise GraphError("colors must be non-negative integers")
    if hadwiger_bound is not None and hadwiger_bound < 1:
        raise GraphError("hadwiger bound must be positive")
    return Graph(n, out, colors, hadwiger_bound, undirected)


def reverse(g: Graph) -> Graph:
    return Graph(g.n, [list(a) for a in g.inn], g.colors, g.hadwiger_bound, g.undirected, g.verts)


def neighborhood(g: Graph, U) -> list[int]:
    """Vertices outside U adjacent (in either direction) to some vertex of U."""
    inside = set(U)
    und = g.und
    found = set()
    for u in inside:
        found.update(und[u])
    return sorted(found - inside)


def induced_subgraph(g: Graph, verts) -> Graph:
    verts = sorted(verts)
    local = {v: i for i, v in enumerate(verts)}
    out = [[local[w] for w in g.out[v] if w in local] for v in verts]
    colors = [g.colors[v] for v in verts] if g.colors is not None else None
    return Graph(len(verts), out, colors, g.hadwiger_bound, g.undirected, [g.host(v) for v in verts])


def quasi_neighborhood(g: Graph, U) -> Graph:
    """G(U): the graph on N[U] keeping exactly the arcs with an endpoint in U."""
    inside = set(U)
    verts = sorted(inside.union(neighborhood(g, inside)))
    local = {v: i for i, v in enumerate(verts)}
    out = []
    for v in verts:
        if v in inside:
            out.append([local[w] for w in g.out[v]])
        else:
            out.append([local[w] for w in g.out[v] if w in inside])
    colors = [g.colors[v] for v in verts] if g.colors is not None else None
    return Graph(len(verts), out, colors, g.hadwiger_bound, g.undirected, [g.host(v) for v in verts])


class Orientation:
    """Assignment of every edge to (at least) one owning endpoint.

    `out[u]` lists the heads of u's outgoing edges.  After enhancement an
    edge may be owned by both endpoints.
    """

    __slots__ = ("n", "out", "_sets")

    def __init__(self, n: int, out):
        self.n = n
        self.out = out
        self._sets = None

    @property
    def cap(self) -> int:
        return max((len(a) for a in self.out), default=0)

    def sets(self) -> list[set]:
        """Out-neighbor sets, built on first use and kept in sync by `add`."""
        if self._sets is None:
            self._sets = [set(a) for a in self.out]
        return self._sets

    def has(self, u: int, v: int) -> bool:
        return v in self.sets()[u]

    def add(self, u: int, v: int) -> bool:
        """Add u->v unless present; True if added."""
        s = self.sets()
        if v in s[u]:
            return False
        s[u].add(v)
        self.out[u].append(v)
        return True

    def arc_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u, a in enumerate(self.out) for v in a}

    def reversed(self) -> "Orientation":
        inn = [[] for _ in range(self.n)]
        for u, a in enumerate(self.out):
            for v in a:
                inn[v].append(u)
        return Orientation(self.n, inn)

    def copy(self) -> "Orientation":
        return Orientation(self.n, [list(a) for a in self.out])

    def __repr__(self) -> str:
        return f"Orientation(n={self.n}, cap={self.cap})"


def validate_orientation(d: Orientation, g: Graph) -> bool:
    """D together with its reverse covers exactly G together with its reverse."""
    sym_g = set()
    for u, v in g.arcs():
        sym_g.add((u, v))
        sym_g.add((v, u))
    sym_d = set()
    for u, v in d.arc_set():
        sym_d.add((u, v))
        sym_d.add((v, u))
    return sym_d == sym_g


def peeling_order(adj: list[list[int]]) -> list[int]:
    """Repeatedly remove a minimum-degree vertex, lowest id first.

    `adj` is an undirected adjacency list.  Degrees live in buckets; each
    bucket is a heap so ties resolve to the lowest id.
    """
    n = len(adj)
    deg = [len(a) for a in adj]
    maxd = max(deg, default=0)
    buckets = [[] for _ in range(maxd + 1)]
    for v in range(n):
        buckets[deg[v]].append(v)
    for b in buckets:
        heapq.heapify(b)
    removed = [False] * n
    order = []
    cur = 0
    while len(order) < n:
        while True:
            b = buckets[cur]
            while b and (removed[b[0]] or deg[b[0]] != cur):
                heapq.heappop(b)
            if b:
                break
            cur += 1
        v = heapq.heappop(buckets[cur])
        removed[v] = True
        order.append(v)
        for w in adj[v]:
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(buckets[deg[w]], w)
        cur = max(0, cur - 1)
    return order


def peel_orientation(g: Graph) -> Orientation:
    """Orient every edge away from whichever endpoint is peeled first."""
    adj = g.und
    order = peeling_order(adj)
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    out = [[w for w in adj[v] if pos[w] > pos[v]] for v in range(g.n)]
    return Orientation(g.n, out)


def greedy_color(g: Graph) -> list[int]:
    """Proper coloring: peel, then color in reverse order avoiding later neighbors."""
    return greedy_color_adj(g.und)


def greedy_color_adj(adj: list[list[int]]) -> list[int]:
    order = peeling_order(adj)
    color = [-1] * len(adj)
    for v in reversed(order):
        used = {color[w] for w in adj[v] if color[w] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


def bounded_bfs(g, u: int, radius: int, adj=None) -> dict[int, int]:
    """Distances from u along directed arcs, truncated at radius."""
    adj = g.out if adj is None else adj
    dist = {u: 0}
    frontier = [u]
    for d in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return dist


def bfs_distances(adj, u: int) -> list[int]:
    """Full BFS; -1 marks unreachable vertices."""
    dist = [-1] * len(adj)
    dist[u] = 0
    q = deque([u])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def components(adj, verts=None) -> list[list[int]]:
    """Connected components (undirected adjacency) restricted to `verts`."""
    if verts is None:
        verts = range(len(adj))
    allowed = set(verts)
    seen = set()
    comps = []
    for s in sorted(allowed):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in allowed and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(comp)
    return comps


# text format -----------------------------------------------------------------

def parse_graph_text(text: str) -> Graph:
    """Parse `n m [directed|undirected]`, m arc lines `u v`, then `c u k` lines."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise GraphError("line 1: missing header")
    lineno, head = lines[0]
    try:
        n, m = int(head[0]), int(head[1])
    except (ValueError, IndexError):
        raise GraphError(f"line {lineno}: header must be 'n m [directed|undirected]'") from None
    kind = head[2] if len(head) > 2 else "directed"
    if kind not in ("directed", "undirected"):
        raise GraphError(f"line {lineno}: unknown graph kind {kind!r}")
    arcs = []
    colors = None
    for lineno, toks in lines[1:]:
        if toks[0] == "c":
            if len(toks) != 3:
                raise GraphError(f"line {lineno}: color line must be 'c u k'")
            try:
                u, k = int(toks[1]), int(toks[2])
            except ValueError:
                raise GraphError(f"line {lineno}: bad integer") from None
            if not 0 <= u < n:
                raise GraphError(f"line {lineno}: vertex {u} out of range")
            if colors is None:
                colors = [None] * n
            colors[u] = k
            continue
        if len(toks) != 2:
            raise GraphError(f"line {lineno}: arc line must be 'u v'")
        try:
            arcs.append((int(toks[0]), int(toks[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: bad integer") from None
    if len(arcs) != m:
        raise GraphError(f"header promises {m} arcs, found {len(arcs)}")
    if colors is not None and any(c is None for c in colors):
        missing = colors.index(None)
        raise GraphError(f"vertex {missing} has no color")
    return build_graph(n, arcs, colors, undirected=kind == "undirected")


def graph_to_text(g: Graph) -> str:
    sym = g.undirected or g.is_symmetric()
    if sym:
        pairs = [(u, v) for u, v in g.arcs() if u < v]
    else:
        pairs = list(g.arcs())
    lines = [f"{g.n} {len(pairs)} {'undirected' if sym else 'directed'}"]
    lines += [f"{u} {v}" for u, v in pairs]
    if g.colors is not None:
        lines += [f"c {u} {k}" for u, k in enumerate(g.colors)]
    return "\n".join(lines) + "\n"
