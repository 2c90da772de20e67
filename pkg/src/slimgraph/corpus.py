"""Seeded generators for bounded-Hadwiger test graphs."""
from __future__ import annotations

import random

from .graph import Graph, build_graph

KINDS = ("tree", "grid", "maximal-planar", "degenerate-k")


def random_tree(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Uniform parent attachment: vertex i picks a parent among 0..i-1."""
    return [(rng.randrange(i), i) for i in range(1, n)]


def grid(n: int) -> list[tuple[int, int]]:
    """rows x cols grid with rows * cols == n, rows the largest divisor of n
    not above sqrt(n)."""
    rows = 1
    for r in range(1, int(n ** 0.5) + 1):
        if n % r == 0:
            rows = r
    cols = n // rows
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return edges


def maximal_planar(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Stacked triangulation: each new vertex goes inside a random face."""
    if n <= 3:
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [(0, 1), (1, 2), (0, 2)]
    faces = [(0, 1, 2), (0, 1, 2)]
    for v in range(3, n):
        i = rng.randrange(len(faces))
        a, b, c = faces[i]
        edges += [(a, v), (b, v), (c, v)]
        faces[i] = (a, b, v)
        faces.append((b, c, v))
        faces.append((a, c, v))
    return edges


def degenerate(n: int, k: int, rng: random.Random) -> list[tuple[int, int]]:
    """Each vertex joins min(i, k) distinct earlier vertices, so peeling in
    reverse insertion order never sees degree above k."""
    edges = []
    for i in range(1, n):
        for u in rng.sample(range(i), min(i, k)):
            edges.append((u, i))
    return edges


def generate(kind: str, n: int, seed: int = 0, colors: int = 0, k: int = 3) -> Graph:
    """Undirected corpus graph; `colors` > 0 attaches random colors in [0, colors)."""
    rng = random.Random(f"{kind}:{n}:{seed}")
    if kind == "tree":
        edges = random_tree(n, rng)
    elif kind == "grid":
        edges = grid(n)
    elif kind == "maximal-planar":
        edges = maximal_planar(n, rng)
    elif kind.startswith("degenerate"):
        suffix = kind.partition("-")[2]
        if suffix and suffix != "k":
            k = int(suffix)
        edges = degenerate(n, k, rng)
    else:
        raise ValueError(f"unknown corpus kind {kind!r}")
    col = [rng.randrange(colors) for _ in range(n)] if colors else None
    return build_graph(n, edges, col, undirected=True)
