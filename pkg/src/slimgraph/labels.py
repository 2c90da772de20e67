"""Hierarchical vertex labels and the index that moves labels between levels.

At an internal node H with parts U0, U1..Up, the U0 vertices take labels
1..|U0| in ascending order of their position in H, and the vertices of Ui
follow in one contiguous block ordered by their label inside the child Hi.

The serialized index (section LBL) mirrors the decomposition tree.  An
internal node part is the prefixed concatenation of

    dict(Y0), then per child i: dict(Yi), copy table, child part

where Y0 marks the first label of every non-empty child block, Yi marks the
child labels that are copies of U0 vertices and the copy table lists their
labels in H.  A leaf part is the leaf's codebook code.
"""
from __future__ import annotations

from .bits import BitString, WordArray, ceil_log2
from .concat import PrefixedConcat, prefixed_concat
from .errors import FormatError
from .fid import Dictionary, dict_bits


def build_labels(tree) -> None:
    """Set node.labels (local vertex -> label) bottom-up over the tree."""
    post = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        post.append(node)
        stack.extend(node.children)
    for node in reversed(post):
        if node.leaf:
            lab = [0] * node.k
            for pos, v in enumerate(node.order):
                lab[v] = pos + 1
            node.labels = lab
            continue
        lab = [0] * node.k
        nxt = 1
        for u in node.parts[0]:
            lab[u] = nxt
            nxt += 1
        for i, child in enumerate(node.children):
            members = set(node.parts[i + 1])
            local = node.maps[i]
            inner = sorted((child.labels[j], x) for j, x in enumerate(local) if x in members)
            for _, x in inner:
                lab[x] = nxt
                nxt += 1
        if nxt != node.k + 1:
            raise AssertionError("labels do not cover the node")
        node.labels = lab


def _word(k: int) -> int:
    return max(1, ceil_log2(k))


def child_vectors(node, i: int):
    """(Yi as a 0/1 list indexed by child label - 1, copy table of parent labels)."""
    child = node.children[i]
    y = [0] * child.k
    table = []
    for j, x in sorted(node.copies[i], key=lambda t: child.labels[t[0]]):
        y[child.labels[j] - 1] = 1
        table.append(node.labels[x])
    return y, table


def y0_vector(node) -> list[int]:
    y = [0] * node.k
    pos = len(node.parts[0])
    for part in node.parts[1:]:
        if part:
            y[pos] = 1
            pos += len(part)
    return y


def _dict_or_empty(y) -> BitString:
    return dict_bits(y) if len(y) else BitString()


def label_section(tree) -> BitString:
    return _label_part(tree.root)


def _label_part(node) -> BitString:
    if node.leaf:
        return node.code
    parts = [_dict_or_empty(y0_vector(node))]
    w = _word(node.k)
    for i, child in enumerate(node.children):
        y, table = child_vectors(node, i)
        parts.append(_dict_or_empty(y))
        parts.append(BitString.from_uints([x - 1 for x in table], w))
        parts.append(_label_part(child))
    return prefixed_concat(parts).bits


class LabelNode:
    """Parsed view of one internal node of the label index."""

    __slots__ = ("k", "u0", "p", "y0", "ys", "tables", "kids", "pc")

    def __init__(self, bits: BitString, pos: int, length: int, k: int):
        pc = PrefixedConcat(bits, pos, length)
        if pc.p < 1 or (pc.p - 1) % 3:
            raise FormatError("label node with a malformed part count")
        self.pc = pc
        self.k = k
        self.p = p = (pc.p - 1) // 3
        ypos, ylen = pc.part(1)
        self.y0 = Dictionary(bits, ypos, ylen) if ylen else None
        if self.y0 is not None and self.y0.m != k:
            raise FormatError("Y0 length differs from the node size")
        self.u0 = (self.y0.select(1) - 1) if self.y0 is not None and self.y0.r else k
        self.ys = []
        self.tables = []
        self.kids = []
        w = _word(k)
        for i in range(p):
            dpos, dlen = pc.part(3 * i + 2)
            y = Dictionary(bits, dpos, dlen) if dlen else None
            tpos, tlen = pc.part(3 * i + 3)
            if tlen % w:
                raise FormatError("copy table is not whole words")
            self.ys.append(y)
            self.tables.append(WordArray(bits, tpos, tlen // w, w))
            self.kids.append(pc.part(3 * i + 4))

    def child_size(self, i: int) -> int:
        y = self.ys[i - 1]
        return y.m if y is not None else 0

    def locate(self, label: int) -> tuple[int, int]:
        """(i, label in child i); i = 0 keeps the label."""
        if not 1 <= label <= self.k:
            raise IndexError(f"label {label} outside 1..{self.k}")
        if self.y0 is None or label <= self.u0:
            return 0, label
        i = self.y0.rank(label)
        j = label - (self.y0.select(i) - 1)
        return i, self.ys[i - 1].select_zero(j)

    def lift(self, i: int, c: int) -> int:
        """Label in this node of the vertex with label c in child i."""
        if i == 0:
            return c
        if not 1 <= i <= self.p:
            raise IndexError(f"child {i} outside 1..{self.p}")
        y = self.ys[i - 1]
        bit, ones = y.access_rank(c)
        if bit:
            return self.tables[i - 1][ones - 1] + 1
        return self.y0.select(i) - 1 + (c - ones)


class LabelIndex:
    """Reader for a LBL section; node views are parsed once and cached."""

    def __init__(self, bits: BitString, pos: int, length: int, n: int, ell: int):
        self.bits = bits
        self.n = n
        self.ell = ell
        self.root = (pos, length, n)
        self._memo: dict = {}

    def node(self, ref) -> LabelNode | None:
        """View of the node at ref = (pos, length, k); None for leaves."""
        if ref[2] <= self.ell:
            return None
        hit = self._memo.get(ref)
        if hit is None:
            hit = LabelNode(self.bits, ref[0], ref[1], ref[2])
            self._memo[ref] = hit
        return hit

    def child_ref(self, ref, nd: LabelNode, i: int):
        pos, ln = nd.kids[i - 1]
        return (pos, ln, nd.child_size(i))

    def resolve(self, label: int):
        """Descend from the root; returns (path, ref, label) where path lists
        (ref, i) steps taken and ref is the node where the vertex is owned:
        a leaf, or an internal node with the vertex in U0."""
        ref = self.root
        path = []
        while True:
            nd = self.node(ref)
            if nd is None:
                return path, ref, label
            i, c = nd.locate(label)
            if i == 0:
                return path, ref, label
            path.append((ref, i))
            ref = self.child_ref(ref, nd, i)
            label = c

    def lift_path(self, path, label: int, memo: dict | None = None) -> int:
        """Lift a label found at the end of `path` back to the root.

        `memo` maps (ref, i, label) to the lifted label one level up and may
        be shared by lookups that run over the same descent paths.
        """
        for ref, i in reversed(path):
            if memo is None:
                label = self.node(ref).lift(i, label)
                continue
            key = (ref, i, label)
            up = memo.get(key)
            if up is None:
                up = memo[key] = self.node(ref).lift(i, label)
            label = up
        return label
