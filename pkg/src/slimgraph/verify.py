"""Invariant checks run by `slimgraph verify`.

Each check yields a (name, passed, detail) triple.  The checks rebuild the
partition, director and archive from the input graph and compare every
stored answer against a direct computation on the graph.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import config
from .codec import Archive, assemble, decode, encode, encode_base
from .director import directive_coverage, t_director, tree_directors
from .graph import Graph, Orientation, bounded_bfs, validate_orientation
from .partition import (balanced_partition, check_h_partition, check_star, default_quotient_size,
                        h_partition, is_balanced, star_partition)
from .query import QueryEngine, build_sections, parse_section_names

INJECTIONS = ("orientation",)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _fmt(d: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in d.items())


def partition_checks(g: Graph) -> list[Check]:
    out = []
    verts = list(range(g.n))
    if g.n >= 3:
        bp = balanced_partition(g)
        out.append(Check("partition.balanced", is_balanced(g.und, verts, bp),
                         f"A={len(bp.A)} B={len(bp.B)} C={len(bp.C)}"))
    m = default_quotient_size(max(1, g.n))
    if g.n:
        hc = check_h_partition(g, h_partition(g, m), m)
        out.append(Check("partition.h", hc["covered"] and hc["H1"] and hc["H2"] and hc["connected"], _fmt(hc)))
    sc = check_star(g, star_partition(g))
    sc = {k: (round(v, 4) if isinstance(v, float) else v) for k, v in sc.items()}
    out.append(Check("partition.star", sc["covered"] and sc["S1"] and sc["S2"], _fmt(sc)))
    return out


def tree_check(tree) -> Check:
    """Every internal node splits into covering parts with nonadjacent non-U0 parts."""
    bad = 0
    internal = 0
    for node in tree.nodes():
        if node.leaf:
            continue
        internal += 1
        k = node.k
        flat = sorted(v for p in node.parts for v in p)
        owner = {}
        for i, p in enumerate(node.parts[1:], 1):
            for v in p:
                owner[v] = i
        und = node.graph.und
        clash = any(owner.get(w, i) != i for v, i in owner.items() for w in und[v] if w in owner)
        shrink = all(c.k < k for c in node.children)
        if flat != list(range(k)) or clash or not shrink:
            bad += 1
    return Check("tree.parts", bad == 0, f"internal={internal} bad={bad} height={tree.height()}")


def director_checks(g: Graph, t: int, tree=None, inject: str | None = None) -> list[Check]:
    d = t_director(g, t).d
    if inject == "orientation":
        d = _drop_one_arc(d)
    elif inject is not None:
        raise ValueError(f"unknown injection {inject!r}")
    out = [Check("director.orientation", validate_orientation(d, g), f"cap={d.cap}")]
    cov = directive_coverage(g, d, t)
    out.append(Check("director.directive", all(a == b for a, b in cov.values()), _coverage(cov)))
    if tree is not None:
        root = tree_directors(tree, t)[id(tree.root)].d
        cov = directive_coverage(g, root, t)
        ok = validate_orientation(root, g) and all(a == b for a, b in cov.values())
        out.append(Check("director.tree", ok, f"cap={root.cap} " + _coverage(cov)))
    return out


def _coverage(cov: dict) -> str:
    return " ".join(f"d{k}={a}/{b}" for k, (a, b) in sorted(cov.items()))


def _drop_one_arc(d: Orientation) -> Orientation:
    out = [list(x) for x in d.out]
    for heads in out:
        if heads:
            heads.pop()
            break
    return Orientation(d.n, out)


def query_mismatches(g: Graph, engine: QueryEngine, labels: list[int], t: int,
                     samples: int, seed: int = 0) -> dict:
    """Compare engine answers with direct computation on g for sampled vertices.

    `labels[v]` is the archive label of vertex v.  Returns mismatch counts
    per query kind; near is checked against a bounded BFS.
    """
    n = g.n
    vertex = {lab: v for v, lab in enumerate(labels)}
    rng = random.Random(seed)
    us = list(range(n)) if n <= samples else rng.sample(range(n), samples)
    bad = {"deg": 0, "color": 0, "nbrs": 0, "adj": 0, "near": 0}
    for u in us:
        lu = labels[u]
        if engine.degree(lu) != (len(g.und[u]), len(g.out[u]), len(g.inn[u])):
            bad["deg"] += 1
        if g.colors is not None and engine.color(lu) != g.colors[u]:
            bad["color"] += 1
        if {vertex[x] for x in engine.neighbors(lu)} != set(g.und[u]):
            bad["nbrs"] += 1
        ball = bounded_bfs(g, u, t)
        partners = [rng.randrange(n) for _ in range(4)] + rng.sample(sorted(ball), min(4, len(ball)))
        for v in partners:
            lv = labels[v]
            if engine.adjacent(lu, lv) != (g.has_arc(u, v), g.has_arc(v, u)):
                bad["adj"] += 1
            path = engine.near(lu, lv, t)
            if not _path_ok(g, u, v, ball.get(v), path, vertex):
                bad["near"] += 1
    return bad


def _path_ok(g, u, v, dist, path, vertex) -> bool:
    if dist is None:
        return path is None
    if path is None or len(path) - 1 != dist:
        return False
    verts = [vertex[x] for x in path]
    return verts[0] == u and verts[-1] == v and all(g.has_arc(a, b) for a, b in zip(verts, verts[1:]))


def run_checks(g: Graph, t: int = config.DEFAULT_T, samples: int = 200, seed: int = 0,
               inject: str | None = None, deep: bool = False) -> list[Check]:
    checks = partition_checks(g)
    enc = encode_base(g, deep)
    checks.append(tree_check(enc.tree))
    checks += director_checks(g, t, enc.tree, inject)
    archive = assemble(enc, build_sections(enc, ["deg", "adj", f"nr{t}", "lbl"], t))
    data = archive.to_bytes()
    back = Archive.from_bytes(data)
    checks.append(Check("codec.roundtrip", decode(back).same_as(g), f"bytes={len(data)}"))
    bad = query_mismatches(g, QueryEngine(back), back.sidecar, t, samples, seed)
    checks.append(Check("query.oracle", not any(bad.values()), _fmt(bad)))
    return checks


def verify_archive(data: bytes, memo: dict | None = None) -> Check:
    """Decode, re-encode with the same sections and demand identical bytes.

    Encoding is deterministic, so any archive the encoder wrote reproduces
    itself exactly; a damaged bit anywhere (payload, section, sidecar or
    padding) makes the comparison fail even when decoding succeeds.
    Decode errors propagate to the caller.  `memo` caches re-encodings by
    graph and section list for callers checking many variants of one archive.
    """
    archive = Archive.from_bytes(data)
    g = decode(archive)
    names = [tag.lower() for tag in archive.section_tags()]
    try:
        parse_section_names(names)
    except ValueError as e:
        return Check("archive.canonical", False, f"n={g.n} {e}")
    memo = {} if memo is None else memo
    key = (g.n, tuple(sorted(g.arcs())), tuple(g.colors or ()), tuple(names))
    for deep in (False, True):
        if (key, deep) not in memo:
            memo[key, deep] = encode(g, names, deep=deep).to_bytes()
        if memo[key, deep] == data:
            return Check("archive.canonical", True, f"n={g.n} sections={','.join(names) or 'none'} deep={int(deep)}")
    return Check("archive.canonical", False, f"n={g.n} re-encoding differs")
