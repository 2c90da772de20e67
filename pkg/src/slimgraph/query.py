"""Query sections and the query engine.

Every section mirrors the decomposition tree: an internal node part is a
prefixed concatenation whose leading parts hold per-node records and whose
remaining parts are the child parts in child order.  Leaf node parts are
empty; answers for leaf vertices come from a table with one entry per
codebook graph, so identical leaves share one copy.  A section is the
pair [tree part, leaf table].

DEG   node: U0 records (degree, out-degree, in-degree[, color]) in label order
ADJ   node: dict(W0), out-edge records of W0 members, neighbor lists of U0
NR<t> node: dict(W0), out-edge records of W0 members (t-director);
      the section carries gamma(t) as a third part after the leaf table

An out-edge record is a count followed by (label - 1, two direction bits)
entries; the direction bits say whether u->v and v->u are arcs of the graph.
"""
from __future__ import annotations

from collections import deque

from . import config
from .bits import READS, BitReader, BitString, BitWriter, ceil_log2
from .canon import graph_from_key
from .codec import Codebook, Encoded, leaf_threshold
from .concat import PrefixedConcat, prefixed_concat
from .director import leaf_director, tree_directors
from .errors import FormatError, SectionError
from .fid import Dictionary, dict_bits
from .graph import Graph
from .labels import LabelIndex, label_section


def _lw(k: int) -> int:
    return max(1, ceil_log2(k))


def _direction(g_has, u, v) -> int:
    return (2 if g_has(u, v) else 0) | (1 if g_has(v, u) else 0)


def _record(entries, k: int) -> BitString:
    """count, then (label - 1, direction bits) per entry."""
    w = _lw(k)
    out = BitWriter()
    out.write(len(entries), k.bit_length())
    for lab, dirs in entries:
        out.write(lab - 1, w)
        out.write(dirs, 2)
    return out.finish()


def _read_record(bits: BitString, pos: int, ln: int, k: int) -> list[tuple[int, int]]:
    w = _lw(k)
    rd = BitReader(bits, pos, pos + ln)
    cnt = rd.read(k.bit_length())
    if cnt * (w + 2) != rd.remaining():
        raise FormatError("record length does not match its count")
    READS.reads += 1 + cnt
    return [(rd.read(w) + 1, rd.read(2)) for _ in range(cnt)]


# builders --------------------------------------------------------------------

def _leaf_graph(key, cw) -> Graph:
    out, colors = graph_from_key(key, cw)
    return Graph(key[0], out, colors)


def _deg_words(g: Graph, u: int, cw: int) -> list[tuple[int, int]]:
    wd = g.n.bit_length()
    words = [(len(g.und[u]), wd), (len(g.out[u]), wd), (len(g.inn[u]), wd)]
    if cw:
        words.append((g.colors[u], cw))
    return words


def build_degree_section(enc: Encoded) -> BitString:
    cw = enc.tree.cw

    def part(node):
        if node.leaf:
            return BitString()
        h = node.graph
        w = BitWriter()
        for u in sorted(node.parts[0], key=lambda x: node.labels[x]):
            for val, width in _deg_words(h, u, cw):
                w.write(val, width)
        return prefixed_concat([w.finish()] + [part(c) for c in node.children]).bits

    entries = []
    for key in enc.codebook.entries():
        g = _leaf_graph(key, cw)
        w = BitWriter()
        for u in range(g.n):
            for val, width in _deg_words(g, u, cw):
                w.write(val, width)
        entries.append(w.finish())
    return prefixed_concat([part(enc.tree.root), prefixed_concat(entries).bits]).bits


def build_orientation_section(enc: Encoded, t: int, neighbor_lists: bool) -> BitString:
    """ADJ (t = 1, with neighbor lists) or NR<t> section."""
    dirs = tree_directors(enc.tree, t)
    cw = enc.tree.cw

    def part(node):
        if node.leaf:
            return BitString()
        nd = dirs[id(node)]
        h = node.graph
        lab = node.labels
        k = h.n
        y = [0] * k
        for u in nd.w0:
            y[lab[u] - 1] = 1
        recs = []
        for u in sorted(nd.w0, key=lambda x: lab[x]):
            ent = sorted((lab[v], _direction(h.has_arc, u, v)) for v in nd.fresh.out[u])
            recs.append(_record(ent, k))
        parts = [dict_bits(y), prefixed_concat(recs).bits]
        if neighbor_lists:
            lists = []
            for u in sorted(node.parts[0], key=lambda x: lab[x]):
                ent = sorted((lab[v], _direction(h.has_arc, u, v)) for v in h.und[u])
                lists.append(_record(ent, k))
            parts.append(prefixed_concat(lists).bits)
        parts += [part(c) for c in node.children]
        return prefixed_concat(parts).bits

    entries = []
    for key in enc.codebook.entries():
        g = _leaf_graph(key, cw)
        d = leaf_director(key, cw, t)
        recs = []
        for u in range(g.n):
            ent = sorted((v + 1, _direction(g.has_arc, u, v)) for v in d.out[u])
            recs.append(_record(ent, g.n))
        entries.append(prefixed_concat(recs).bits)
    parts = [part(enc.tree.root), prefixed_concat(entries).bits]
    if not neighbor_lists:
        # t again inside the content, so a damaged NR<t> tag cannot pass for another distance
        w = BitWriter()
        w.write_gamma(t)
        parts.append(w.finish())
    return prefixed_concat(parts).bits


def parse_section_names(names, t: int = config.DEFAULT_T) -> list[tuple[str, int]]:
    """['deg', 'adj', 'nr3', 'lbl'] -> [(tag, t)]; 'nr' alone uses t."""
    out = []
    for raw in names:
        name = raw.strip().lower()
        if not name:
            continue
        if name in ("deg", "adj", "lbl"):
            out.append((name.upper(), 1))
        elif name.startswith("nr"):
            tt = int(name[2:]) if name[2:] else t
            if not 1 <= tt <= 9:
                raise ValueError(f"near-query distance {tt} outside 1..9")
            out.append((f"NR{tt}", tt))
        else:
            raise ValueError(f"unknown section {raw!r}")
    tags = [tag for tag, _ in out]
    if len(set(tags)) != len(tags):
        raise ValueError("section listed twice")
    return out


def build_sections(enc: Encoded, names, t: int = config.DEFAULT_T) -> list[tuple[str, BitString]]:
    built = []
    for tag, tt in parse_section_names(names, t):
        if tag == "DEG":
            built.append((tag, build_degree_section(enc)))
        elif tag == "ADJ":
            built.append((tag, build_orientation_section(enc, 1, True)))
        elif tag == "LBL":
            built.append((tag, label_section(enc.tree)))
        else:
            built.append((tag, build_orientation_section(enc, tt, False)))
    return built


# reading ---------------------------------------------------------------------

class _SectionNode:
    __slots__ = ("pc", "w0", "records", "lists", "first_child", "extra")


class _Section:
    """Parsed view of one section; node views are cached by position."""

    def __init__(self, bits: BitString, pos: int, ln: int, tag: str):
        pc = PrefixedConcat(bits, pos, ln)
        near = tag.startswith("NR")
        if pc.p != 2 + near:
            raise FormatError(f"section {tag} has {pc.p} parts")
        if near:
            start, length = pc.part(3)
            if BitReader(bits, start, start + length).read_gamma() != int(tag[2:]):
                raise FormatError(f"section {tag} was built for another distance")
        self.bits = bits
        self.tag = tag
        self.root = pc.part(1)
        self.leaves = PrefixedConcat(bits, *pc.part(2))
        self._nodes: dict = {}
        self._entries: dict = {}

    def node(self, ref, k: int) -> _SectionNode:
        hit = self._nodes.get(ref)
        if hit is not None:
            return hit
        pc = PrefixedConcat(self.bits, ref[0], ref[1])
        nd = _SectionNode()
        nd.pc = pc
        nd.w0 = nd.records = nd.lists = None
        if self.tag == "DEG":
            nd.first_child = 2
        else:
            nd.w0 = Dictionary(self.bits, *pc.part(1))
            if nd.w0.m != k:
                raise FormatError("W0 dictionary length differs from node size")
            nd.records = PrefixedConcat(self.bits, *pc.part(2))
            if self.tag == "ADJ":
                nd.lists = PrefixedConcat(self.bits, *pc.part(3))
                nd.first_child = 4
            else:
                nd.first_child = 3
        self._nodes[ref] = nd
        return nd

    def child(self, nd: _SectionNode, i: int):
        return nd.pc.part(nd.first_child + i - 1)

    def entry(self, position: int) -> PrefixedConcat | tuple:
        hit = self._entries.get(position)
        if hit is None:
            hit = self.leaves.part(position + 1)
            if self.tag != "DEG":
                hit = PrefixedConcat(self.bits, *hit)
            self._entries[position] = hit
        return hit


class QueryEngine:
    """Answers queries from an archive; labels are the archive's top labels."""

    def __init__(self, archive):
        self.archive = archive
        self.bits = archive.container
        self.n = archive.n
        top = archive.top
        self.book = Codebook.parse(self.bits, *top.part(1))
        self.ell = leaf_threshold(self.n)
        self.cw = self.book.cw
        self.tags = archive.section_tags()
        self._sections: dict = {}
        self._leaf_pos: dict = {}
        self._leaf_graphs: dict = {}
        try:
            pos, ln = archive.section("LBL")
        except KeyError:
            raise SectionError("archive has no LBL section") from None
        self.labels = LabelIndex(self.bits, pos, ln, self.n, self.ell)

    def section(self, tag: str) -> _Section:
        sec = self._sections.get(tag)
        if sec is None:
            try:
                pos, ln = self.archive.section(tag)
            except KeyError:
                raise SectionError(f"archive has no {tag} section") from None
            sec = _Section(self.bits, pos, ln, tag)
            self._sections[tag] = sec
        return sec

    def near_tag(self, t: int) -> str:
        """Smallest NR section answering distance t."""
        best = None
        for tag in self.tags:
            if tag.startswith("NR") and tag[2:].isdigit() and int(tag[2:]) >= t:
                if best is None or int(tag[2:]) < int(best[2:]):
                    best = tag
        if best is None:
            raise SectionError(f"archive has no NR section for distance {t}")
        return best

    def _check(self, label: int) -> None:
        if not 1 <= label <= self.n:
            raise IndexError(f"label {label} outside 1..{self.n}")

    def _leaf_position(self, ref) -> int:
        hit = self._leaf_pos.get(ref)
        if hit is None:
            cls, idx, _ = self.book.lookup(self.bits, ref[0], ref[1])
            hit = self.book.position(cls, idx)
            self._leaf_pos[ref] = hit
        return hit

    def leaf_graph(self, position: int) -> Graph:
        g = self._leaf_graphs.get(position)
        if g is None:
            g = _leaf_graph(self.book.entries()[position], self.cw)
            self._leaf_graphs[position] = g
        return g

    # per-vertex records

    def degree(self, label: int) -> tuple[int, int, int]:
        rec = self._deg_record(label)
        return rec[0], rec[1], rec[2]

    def color(self, label: int) -> int:
        if not self.cw:
            raise SectionError("archive has no colors")
        return self._deg_record(label)[3]

    def _deg_record(self, label: int) -> list[int]:
        self._check(label)
        sec = self.section("DEG")
        lbl = self.labels
        ref = lbl.root
        sref = sec.root
        widths_extra = [self.cw] if self.cw else []
        while True:
            nd = lbl.node(ref)
            if nd is None:
                k = ref[2]
                pos, _ = sec.entry(self._leaf_position(ref))
                return self._read_words(pos, label - 1, k, widths_extra)
            i, c = nd.locate(label)
            if i == 0:
                snode = sec.node(sref, ref[2])
                pos, _ = snode.pc.part(1)
                return self._read_words(pos, label - 1, ref[2], widths_extra)
            snode = sec.node(sref, ref[2])
            sref = sec.child(snode, i)
            ref = lbl.child_ref(ref, nd, i)
            label = c

    def _read_words(self, pos: int, index: int, k: int, extra: list[int]) -> list[int]:
        wd = k.bit_length()
        widths = [wd, wd, wd] + extra
        stride = sum(widths)
        at = pos + index * stride
        vals = []
        for w in widths:
            vals.append(self.bits.read(at, w))
            at += w
        READS.reads += 1
        return vals

    def out_edges(self, label: int, tag: str = "ADJ", memo: dict | None = None) -> dict[int, int]:
        """{neighbor label: direction bits} over the out-edges of the vertex.

        `memo` caches label lifts and may be shared across calls in one query.
        """
        self._check(label)
        sec = self.section(tag)
        lbl = self.labels
        ref = lbl.root
        sref = sec.root
        path = []
        found: dict = {}
        while True:
            nd = lbl.node(ref)
            if nd is None:
                entry = sec.entry(self._leaf_position(ref))
                for c, dirs in _read_record(self.bits, *entry.part(label), ref[2]):
                    found[lbl.lift_path(path, c, memo)] = dirs
                return found
            snode = sec.node(sref, ref[2])
            inside, j = snode.w0.access_rank(label)
            if inside:
                for c, dirs in _read_record(self.bits, *snode.records.part(j), ref[2]):
                    found[lbl.lift_path(path, c, memo)] = dirs
            i, c = nd.locate(label)
            if i == 0:
                return found
            path.append((ref, i))
            sref = sec.child(snode, i)
            ref = lbl.child_ref(ref, nd, i)
            label = c

    def neighbors(self, label: int) -> dict[int, int]:
        """{neighbor label: direction bits} over all neighbors of the vertex."""
        self._check(label)
        sec = self.section("ADJ")
        lbl = self.labels
        ref = lbl.root
        sref = sec.root
        path = []
        while True:
            nd = lbl.node(ref)
            if nd is None:
                g = self.leaf_graph(self._leaf_position(ref))
                u = label - 1
                READS.reads += 1
                return {lbl.lift_path(path, v + 1): _direction(g.has_arc, u, v) for v in g.und[u]}
            snode = sec.node(sref, ref[2])
            i, c = nd.locate(label)
            if i == 0:
                rec = _read_record(self.bits, *snode.lists.part(label), ref[2])
                return {lbl.lift_path(path, v): dirs for v, dirs in rec}
            path.append((ref, i))
            sref = sec.child(snode, i)
            ref = lbl.child_ref(ref, nd, i)
            label = c

    def _fetch(self, tag: str, fetched: dict | None, lifts: dict):
        """Out-edge lookup that keeps results in `fetched` when the caller
        passes a dict (bulk verification); timing runs pass nothing."""
        if fetched is None:
            fetched = {}

        def out(x):
            r = fetched.get((tag, x))
            if r is None:
                r = fetched[(tag, x)] = self.out_edges(x, tag, lifts)
            return r

        return out

    def adjacent(self, u: int, v: int, fetched: dict | None = None) -> tuple[bool, bool]:
        """(u->v is an arc, v->u is an arc)."""
        out = self._fetch("ADJ", fetched, {})
        a = out(u).get(v)
        if a is not None:
            return bool(a & 2), bool(a & 1)
        b = out(v).get(u)
        if b is not None:
            return bool(b & 1), bool(b & 2)
        return False, False

    def near(self, u: int, v: int, t: int, fetched: dict | None = None) -> list[int] | None:
        """Lexicographically least shortest u-v path (labels) if d(u,v) <= t."""
        self._check(u)
        self._check(v)
        if u == v:
            return [u]
        tag = self.near_tag(t)
        out = self._fetch(tag, fetched, {})

        W = set()
        for s in (u, v):
            dist = {s: 0}
            frontier = [s]
            for r in range(1, t + 1):
                nxt = []
                for x in frontier:
                    for y in out(x):
                        if y not in dist:
                            dist[y] = r
                            nxt.append(y)
                frontier = nxt
            W.update(dist)
        arcs = {x: [] for x in W}
        for x in W:
            for y, dirs in out(x).items():
                if y in W:
                    if dirs & 2:
                        arcs[x].append(y)
                    if dirs & 1:
                        arcs[y].append(x)
        self.last_w = len(W)
        return shortest_least_path(arcs, u, v, t)


def shortest_least_path(arcs: dict, u: int, v: int, t: int) -> list[int] | None:
    """Among shortest u-v paths of length <= t in `arcs`, the least label sequence."""
    rev: dict = {}
    for x, ys in arcs.items():
        for y in ys:
            rev.setdefault(y, set()).add(x)
    dist = {v: 0}
    q = deque([v])
    while q:
        x = q.popleft()
        if dist[x] >= t:
            continue
        for y in rev.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    if u not in dist:
        return None
    path = [u]
    x = u
    while x != v:
        x = min(y for y in set(arcs[x]) if dist.get(y, -1) == dist[x] - 1)
        path.append(x)
    return path


def open_engine(data: bytes) -> QueryEngine:
    from .codec import Archive

    return QueryEngine(Archive.from_bytes(data))
