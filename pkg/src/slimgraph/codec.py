"""Decomposition tree, leaf codebook, recursive code and archive format.

Encoding proceeds in three steps:

1. build_tree: split the graph recursively.  A node H with more than
   `leaf_threshold(n)` vertices is divided by a star partition into U0 (the
   partition's V0 plus the vertices of H with neighbors outside H) and
   U1..Up; child i is the quasi-neighborhood H(Ui).
2. build_codebook: every distinct leaf (up to color-preserving isomorphism)
   gets a short code.  Leaves whose boundary is nearly empty form the
   preferred class and are listed first.
3. code(H) is the leaf code for leaves, and otherwise the prefixed
   concatenation of code(H0), code(H1), ..., code(Hp).

code(H0) carries, in fixed-width fields of ceil(log2 |V(H)|) bits:
(a) |U0| and the number of stored arcs, (b) the arcs of H[U0] as label
pairs, (c) per child its vertex count and the (child label, U0 label)
pairs of its copies of U0 vertices, (d) the colors of U0 vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import config
from .bits import BitReader, BitString, BitWriter, ceil_log2
from .canon import canonical_order, color_width, graph_from_key, key_bits
from .concat import PrefixedConcat, prefixed_concat
from .errors import CodebookError, DecodeError, FormatError, GraphError, HeaderError, TruncatedError
from .graph import Graph, build_graph, neighborhood, quasi_neighborhood
from .partition import default_degree_cap, star_partition


def leaf_threshold(n: int) -> int:
    """max(3, ceil(log2 log2 n))."""
    if n < 4:
        return 3
    return max(3, math.ceil(math.log2(math.log2(n)) - 1e-12))


def part_target(k: int, ell: int) -> int:
    """Largest part the codec asks the star partition for at a k-vertex node."""
    return max(ell, 2 * ceil_log2(k) ** 2)


@dataclass
class Node:
    verts: list[int]
    graph: Graph
    boundary: set
    leaf: bool = False
    parts: list = field(default_factory=list)
    children: list = field(default_factory=list)
    copies: list = field(default_factory=list)
    maps: list = field(default_factory=list)
    labels: list | None = None
    key: tuple | None = None
    order: list | None = None
    star: bool = False
    code: BitString | None = None

    @property
    def k(self) -> int:
        return self.graph.n

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class Tree:
    root: Node
    ell: int
    n: int
    symmetric: bool
    cw: int

    def nodes(self):
        return self.root.walk()

    def height(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in node.children)
        return best

    def stats(self) -> dict:
        copies = 0
        arcs = 0
        leaves = 0
        for node in self.nodes():
            if node.leaf:
                leaves += 1
                copies += node.k
                arcs += node.graph.num_arcs
            else:
                copies += len(node.parts[0])
                arcs += _h0_arc_count(node)
        return {"height": self.height(), "vertex_copies": copies, "arcs": arcs, "leaves": leaves}


def _h0_arc_count(node: Node) -> int:
    u0 = set(node.parts[0])
    return sum(1 for u in node.parts[0] for v in node.graph.out[u] if v in u0)


def boundary_in(g: Graph, verts: list[int]) -> set:
    """Local indices of vertices with a neighbor of g outside `verts`."""
    inside = set(verts)
    und = g.und
    size = len(verts)
    out = set()
    for j, v in enumerate(verts):
        nb = und[v]
        if len(nb) >= size or any(w not in inside for w in nb):
            out.add(j)
    return out


def build_tree(g: Graph, deep: bool = False) -> Tree:
    """Decompose g until every leaf has at most leaf_threshold(n) vertices.

    A node whose star partition cannot produce a smaller child is stored
    flat (all of it in U0).  With `deep`, the part target is halved and the
    partition retried first, so the recursion reaches leaves more often at
    the price of more boundary copies.
    """
    n = g.n
    ell = leaf_threshold(n)
    symmetric = g.is_symmetric()
    root = Node(list(range(n)), g, set())
    stack = [root]
    while stack:
        node = stack.pop()
        _expand(g, node, ell, deep)
        stack.extend(node.children)
    return Tree(root, ell, n, symmetric, color_width(g.colors))


def _split_node(g: Graph, node: Node, target: int):
    h = node.graph
    k = h.n
    sp = star_partition(h, quotient_size=k, leaf_size=target, degree_cap=default_degree_cap(k))
    bnd = node.boundary
    u0 = set(sp.V0) | bnd
    parts = [[v for v in p if v not in bnd] for p in sp.parts]
    parts = [p for p in parts if p] + [p for p in parts if not p]
    children = []
    for p in parts:
        q = quasi_neighborhood(h, p)
        if q.n >= k:
            return None
        inside = set(p)
        local = sorted(inside.union(neighborhood(h, p)))
        copies = [(j, x) for j, x in enumerate(local) if x not in inside]
        child = Node(q.verts, q, boundary_in(g, q.verts))
        children.append((child, copies, local))
    return u0, parts, children


def _expand(g: Graph, node: Node, ell: int, deep: bool = False) -> None:
    k = node.k
    if k <= ell:
        node.leaf = True
        return
    target = part_target(k, ell)
    split = _split_node(g, node, target)
    while deep and not split and target > ell:
        target = max(ell, target // 2)
        split = _split_node(g, node, target)
    if not split or not split[2]:
        node.parts = [list(range(k))]
        node.children = []
        node.copies = []
        node.maps = []
        return
    u0, parts, children = split
    node.parts = [sorted(u0)] + parts
    node.children = [c for c, _, _ in children]
    node.copies = [cp for _, cp, _ in children]
    node.maps = [m for _, _, m in children]


def classify_leaf_occurrence(g: Graph, h: Graph, U) -> bool:
    """True iff h equals the quasi-neighborhood g(U) and U has at most
    max(1, floor(k / log2(k)^2)) outside neighbors, k = |V(h)|."""
    U = sorted(U)
    q = quasi_neighborhood(g, U)
    same = q.verts == [h.host(x) for x in range(h.n)] and q.host_arcs() == h.host_arcs()
    if not same:
        return False
    k = h.n
    limit = max(1, int(k / math.log2(k) ** 2)) if k > 1 else 1
    return q.n - len(U) <= limit


# codebook --------------------------------------------------------------------

@dataclass
class Codebook:
    symmetric: bool
    cw: int
    star: list        # canonical keys of the preferred class, in code order
    plain: list
    index: dict       # key -> (class bit, index)

    def code_of(self, key) -> BitString:
        cls, idx = self.index[key]
        return code_bits(cls, idx)

    def entries(self) -> list:
        return self.star + self.plain

    def position(self, cls: int, idx: int) -> int:
        return idx if cls == 0 else len(self.star) + idx

    def lookup(self, bits: BitString, pos: int = 0, length: int | None = None):
        """Canonical key stored under the code bits[pos:pos+length]."""
        if length is None:
            length = len(bits) - pos
        if length < 2:
            raise CodebookError(f"leaf code of {length} bits")
        cls = bits.read(pos, 1)
        if length - 1 > 62:
            raise CodebookError("leaf code too long")
        idx = bits.read(pos + 1, length - 1)
        if length - 1 != max(1, idx.bit_length()):
            raise CodebookError("leaf code is not minimal")
        table = self.star if cls == 0 else self.plain
        if idx >= len(table):
            raise CodebookError(f"leaf code {cls}:{idx} not in codebook")
        return cls, idx, table[idx]

    def serialize(self) -> BitString:
        w = BitWriter()
        w.write(int(self.symmetric), 1)
        w.write(int(self.cw > 0), 1)
        w.write_gamma(self.cw + 1)
        w.write_gamma(len(self.star) + 1)
        w.write_gamma(len(self.plain) + 1)
        for key in self.star + self.plain:
            w.write_bits(key_bits(key))
        return w.finish()

    @classmethod
    def parse(cls, bits: BitString, pos: int, length: int) -> "Codebook":
        rd = BitReader(bits, pos, pos + length)
        symmetric = bool(rd.read(1))
        colored = rd.read(1)
        cw = rd.read_gamma() - 1
        if bool(colored) != (cw > 0) or cw > 32:
            raise FormatError("inconsistent color width in codebook")
        ns = rd.read_gamma() - 1
        np_ = rd.read_gamma() - 1
        if ns + np_ > length:
            raise FormatError("codebook entry count exceeds its size")
        keys = []
        for _ in range(ns + np_):
            k = rd.read_gamma() - 1
            if k > 8:
                raise FormatError(f"codebook entry with {k} vertices")
            row = tuple(rd.read(1) for _ in range(k * (k - 1) + k * cw))
            keys.append((k, row))
        star, plain = keys[:ns], keys[ns:]
        index = {key: (0, i) for i, key in enumerate(star)}
        index.update({key: (1, i) for i, key in enumerate(plain)})
        return cls(symmetric, cw, star, plain, index)


def code_bits(cls: int, idx: int) -> BitString:
    w = BitWriter()
    w.write(cls, 1)
    w.write(idx, max(1, idx.bit_length()))
    return w.finish()


def _sort_key(key):
    return (key[0], key[1])


def build_codebook(tree: Tree, g: Graph | None = None) -> Codebook:
    """Canonicalize every leaf, classify it, and assign codes.

    Entries are ordered by class (preferred first), vertex count, canonical
    row; a code is the class bit plus the minimal-width binary index.
    """
    star_keys = set()
    all_keys = set()
    for node in tree.nodes():
        if not node.leaf:
            continue
        key, order = canonical_order(node.graph, tree.cw)
        node.key = key
        node.order = order
        all_keys.add(key)
        if node.star:
            star_keys.add(key)
    star = sorted(star_keys, key=_sort_key)
    plain = sorted(all_keys - star_keys, key=_sort_key)
    index = {key: (0, i) for i, key in enumerate(star)}
    index.update({key: (1, i) for i, key in enumerate(plain)})
    book = Codebook(tree.symmetric, tree.cw, star, plain, index)
    for node in tree.nodes():
        if node.leaf:
            node.code = book.code_of(node.key)
    return book


def mark_star_leaves(tree: Tree, g: Graph) -> None:
    """Flag leaf occurrences passing the near-empty-boundary test."""
    stack = [(tree.root, None, None)]
    while stack:
        node, parent, i = stack.pop()
        if node.leaf:
            if parent is None:
                node.star = True
            else:
                U = [parent.verts[x] for x in parent.parts[i]]
                node.star = _star_fast(g, node, U)
            continue
        for j, c in enumerate(node.children):
            stack.append((c, node, j + 1))


def _star_fast(g: Graph, node: Node, U) -> bool:
    """classify_leaf_occurrence specialised to a tree leaf."""
    k = node.k
    limit = max(1, int(k / math.log2(k) ** 2)) if k > 1 else 1
    if k - len(U) > limit:
        return False
    inside = set(U)
    verts = set(node.verts)
    arcs = 0
    for u in U:
        for w in g.out[u]:
            if w not in verts:
                return False
            arcs += 1
        for w in g.inn[u]:
            if w not in verts:
                return False
            if w not in inside:
                arcs += 1
    return arcs == node.graph.num_arcs


# code(G) ---------------------------------------------------------------------

def _fields(k: int) -> tuple[int, int]:
    return max(1, ceil_log2(k)), k.bit_length()


def h0_code(node: Node, symmetric: bool, cw: int, colors) -> BitString:
    k = node.k
    w, wc = _fields(k)
    lab = node.labels
    u0 = node.parts[0]
    u0set = set(u0)
    pairs = []
    for u in u0:
        for v in node.graph.out[u]:
            if v in u0set and (not symmetric or lab[u] < lab[v]):
                pairs.append((lab[u] - 1, lab[v] - 1))
    pairs.sort()
    out = BitWriter()
    out.write(len(u0), wc)
    out.write(len(pairs), 2 * wc)
    flat = [x for p in pairs for x in p]
    out.write_array(flat, w)
    for child, copies in zip(node.children, node.copies):
        cl = child.labels
        cp = sorted((cl[j] - 1, lab[x] - 1) for j, x in copies)
        out.write(child.k, w)
        out.write(len(cp), w)
        out.write_array([x for p in cp for x in p], w)
    if cw:
        by_label = sorted(u0, key=lambda u: lab[u])
        out.write_array([colors[node.verts[u]] for u in by_label], cw)
    return out.finish()


def encode_node(node: Node, symmetric: bool, cw: int, colors) -> BitString:
    if node.leaf:
        return node.code
    parts = [h0_code(node, symmetric, cw, colors)]
    parts += [encode_node(c, symmetric, cw, colors) for c in node.children]
    return prefixed_concat(parts).bits


@dataclass
class Encoded:
    """Everything the encoder computed, kept for section builders and reports."""
    graph: Graph
    tree: Tree
    codebook: Codebook
    chi: BitString
    code: BitString


def encode_base(g: Graph, deep: bool = False) -> Encoded:
    from .labels import build_labels

    tree = build_tree(g, deep)
    mark_star_leaves(tree, g)
    book = build_codebook(tree, g)
    build_labels(tree)
    code = encode_node(tree.root, tree.symmetric, tree.cw, g.colors)
    return Encoded(g, tree, book, book.serialize(), code)


# decoding --------------------------------------------------------------------

def decode_code(bits: BitString, pos: int, length: int, k: int, ell: int, book: Codebook):
    """Graph on labels 0..k-1 encoded at bits[pos:pos+length]: (out, colors)."""
    if k <= ell:
        _, _, key = book.lookup(bits, pos, length)
        if key[0] != k:
            raise FormatError(f"leaf code names a {key[0]}-vertex graph where {k} were expected")
        return graph_from_key(key, book.cw)
    pc = PrefixedConcat(bits, pos, length)
    pc.validate()
    if pc.p < 1:
        raise FormatError("internal node without its own part")
    p = pc.p - 1
    w, wc = _fields(k)
    hpos, hlen = pc.part(1)
    rd = BitReader(bits, hpos, hpos + hlen)
    nu0 = rd.read(wc)
    narcs = rd.read(2 * wc)
    if nu0 > k or 2 * narcs * w > hlen:
        raise FormatError("H0 header out of range")
    out = [[] for _ in range(k)]
    sym = book.symmetric
    for _ in range(narcs):
        a = rd.read(w)
        b = rd.read(w)
        if a >= nu0 or b >= nu0:
            raise FormatError("H0 arc endpoint outside U0")
        out[a].append(b)
        if sym:
            out[b].append(a)
    kids = []
    for _ in range(p):
        ki = rd.read(w)
        ci = rd.read(w)
        if ci > ki or ki >= k or ci * 2 * w > rd.remaining():
            raise FormatError("child header out of range")
        cp = [(rd.read(w), rd.read(w)) for _ in range(ci)]
        kids.append((ki, cp))
    colors = None
    if book.cw:
        colors = [0] * k
        for lab in range(nu0):
            colors[lab] = rd.read(book.cw)
    if rd.remaining():
        raise FormatError("trailing bits in H0 code")
    offset = nu0
    for i, (ki, cp) in enumerate(kids):
        cpos, clen = pc.part(i + 2)
        cout, ccol = decode_code(bits, cpos, clen, ki, ell, book)
        mapping = [-1] * ki
        for cl, pl in cp:
            if cl >= ki or pl >= nu0 or mapping[cl] >= 0:
                raise FormatError("bad copy pair")
            mapping[cl] = pl
        for j in range(ki):
            if mapping[j] < 0:
                if offset >= k:
                    raise FormatError("children hold more vertices than the node")
                mapping[j] = offset
                offset += 1
                if colors is not None:
                    colors[mapping[j]] = ccol[j]
        for j in range(ki):
            mj = mapping[j]
            for x in cout[j]:
                out[mj].append(mapping[x])
    if offset != k:
        raise FormatError(f"node of {k} vertices decoded {offset}")
    return out, colors


# archive ---------------------------------------------------------------------

@dataclass
class Archive:
    """Bit-exact container: header, payload parts, sidecar label map."""
    n: int
    container: BitString
    sidecar: list[int]

    @property
    def top(self) -> PrefixedConcat:
        return PrefixedConcat(self.container)

    def part_bits(self, i: int) -> BitString:
        return self.top.part_bits(i)

    @property
    def base_bits(self) -> int:
        top = self.top
        return top.get(1)[1] + top.get(2)[1]

    def section_tags(self) -> list[str]:
        top = self.top
        tags = []
        for i in range(3, top.p):
            pos, ln = top.part(i)
            tags.append(_read_tag(self.container, pos, ln))
        return tags

    def section(self, tag: str) -> tuple[int, int]:
        """(absolute position, length) of a section's content."""
        top = self.top
        for i in range(3, top.p):
            pos, ln = top.part(i)
            if _read_tag(self.container, pos, ln) == tag:
                return pos + 24, ln - 24
        raise KeyError(tag)

    def section_sizes(self) -> dict[str, int]:
        top = self.top
        out = {}
        for i in range(3, top.p):
            pos, ln = top.part(i)
            out[_read_tag(self.container, pos, ln)] = ln
        return out

    def to_bytes(self) -> bytes:
        head = config.MAGIC + bytes([config.VERSION]) + self.n.to_bytes(8, "big")
        side = _sidecar_bytes(self.sidecar, self.n)
        return head + self.container.to_bytes_padded() + len(side).to_bytes(8, "big") + side

    @classmethod
    def from_bytes(cls, data: bytes) -> "Archive":
        if len(data) < 13 or data[:4] != config.MAGIC:
            raise HeaderError("bad magic")
        if data[4] != config.VERSION:
            raise HeaderError(f"unsupported version {data[4]}")
        n = int.from_bytes(data[5:13], "big")
        body = BitString(data[13:])
        top = PrefixedConcat(body)
        if top.p < 3:
            raise HeaderError("archive needs codebook, code and end marker parts")
        end = top._start_word(top.p)
        if not 1 <= end <= top.n + 1:
            raise TruncatedError("end marker beyond the data")
        bits = top.payload + end - 1
        nbytes = (bits + 7) >> 3
        container = BitString(data[13:13 + nbytes], bits)
        PrefixedConcat(container).validate()
        rest = data[13 + nbytes:]
        if len(rest) < 8:
            raise TruncatedError("sidecar length missing")
        slen = int.from_bytes(rest[:8], "big")
        if slen != len(rest) - 8:
            raise TruncatedError("sidecar length does not match file size")
        sidecar = _parse_sidecar(rest[8:], n)
        return cls(n, container, sidecar)


def _read_tag(bits: BitString, pos: int, ln: int) -> str:
    if ln < 24:
        raise FormatError("section shorter than its tag")
    raw = bits.read(pos, 24).to_bytes(3, "big")
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("section tag is not ASCII") from None


def tag_bits(tag: str) -> BitString:
    raw = tag.encode("ascii")
    if len(raw) != 3:
        raise ValueError("section tags have three characters")
    return BitString(raw, 24)


def _sidecar_bytes(labels: list[int], n: int) -> bytes:
    w = max(1, n.bit_length())
    bw = BitWriter()
    if labels:
        bw.write_array([x - 1 for x in labels], w)
    return bytes([w]) + bw.finish().to_bytes_padded()


def _parse_sidecar(data: bytes, n: int) -> list[int]:
    if not data:
        raise TruncatedError("empty sidecar")
    w = data[0]
    if w != max(1, n.bit_length()):
        raise HeaderError("sidecar width does not match n")
    body = data[1:]
    if len(body) != (n * w + 7) // 8:
        raise TruncatedError("sidecar size does not match n")
    bits = BitString(body)
    labels = [bits.read(i * w, w) + 1 for i in range(n)]
    if sorted(labels) != list(range(1, n + 1)):
        raise FormatError("sidecar is not a permutation")
    return labels


def assemble(enc: Encoded, sections: list[tuple[str, BitString]] = ()) -> Archive:
    parts = [enc.chi, enc.code] + [BitString.concat([tag_bits(t), b]) for t, b in sections] + [BitString()]
    container = prefixed_concat(parts).bits
    labels = enc.tree.root.labels
    return Archive(enc.graph.n, container, list(labels))


def encode(g: Graph, sections=(), t: int = config.DEFAULT_T, deep: bool = False) -> Archive:
    """Encode g; `sections` names query sections: deg, adj, nr<t>, lbl."""
    enc = encode_base(g, deep)
    built = []
    if sections:
        from .query import build_sections

        built = build_sections(enc, sections, t)
    return assemble(enc, built)


def decode_labeled(archive: Archive) -> Graph:
    """The encoded graph on labels (vertex L-1 has label L)."""
    top = archive.top
    cpos, clen = top.part(1)
    book = Codebook.parse(archive.container, cpos, clen)
    n = archive.n
    if n > 8 * clen + 8 * top.length + 8:
        raise HeaderError("vertex count inconsistent with payload size")
    gpos, glen = top.part(2)
    out, colors = decode_code(archive.container, gpos, glen, n, leaf_threshold(n), book)
    arcs = [(u, v) for u in range(n) for v in out[u]]
    try:
        g = build_graph(n, arcs, colors)
    except GraphError as e:
        raise FormatError(f"decoded arcs invalid: {e}") from None
    g.out = out
    g.undirected = book.symmetric
    return g


def decode(archive: Archive) -> Graph:
    """The encoded graph on the original vertex ids (via the sidecar map)."""
    lg = decode_labeled(archive)
    n = archive.n
    label = archive.sidecar
    vertex = [0] * n
    for v, lab in enumerate(label):
        vertex[lab - 1] = v
    out = [None] * n
    for u in range(n):
        out[vertex[u]] = [vertex[x] for x in lg.out[u]]
    colors = None
    if lg.colors is not None:
        colors = [lg.colors[label[v] - 1] for v in range(n)]
    return Graph(n, out, colors, None, lg.undirected)


def decode_bytes(data: bytes) -> Graph:
    """Decode raw archive bytes; every failure surfaces as a DecodeError."""
    try:
        return decode(Archive.from_bytes(data))
    except DecodeError:
        raise
    except (IndexError, ValueError, OverflowError, KeyError, RecursionError) as e:
        raise FormatError(f"malformed archive: {type(e).__name__}: {e}") from None
