"""Size, encode/decode time and query-time measurements over corpus graphs."""
from __future__ import annotations

import random
import statistics
import time

from . import config, corpus
from .codec import Archive, assemble, decode, encode_base
from .graph import Graph
from .query import QueryEngine, build_sections


def size_row(kind: str, n: int, seed: int = 0, deep: bool = False) -> dict:
    """Payload bits (codebook + code, no query sections) per vertex."""
    g = corpus.generate(kind, n, seed=seed)
    t0 = time.perf_counter()
    enc = encode_base(g, deep)
    t1 = time.perf_counter()
    archive = assemble(enc)
    back = decode(Archive.from_bytes(archive.to_bytes()))
    t2 = time.perf_counter()
    payload = len(enc.chi) + len(enc.code)
    return {
        "kind": kind,
        "n": n,
        "payload_bits": payload,
        "bits_per_vertex": round(payload / n, 4),
        "height": enc.tree.height(),
        "roundtrip": "ok" if back.same_as(g) else "mismatch",
        "encode_s": round(t1 - t0, 3),
        "decode_s": round(t2 - t1, 3),
    }


def query_workload(g: Graph, labels: list[int], count: int, t: int, seed: int = 0) -> list[tuple]:
    """`count` queries alternating adjacency and near.

    Half the partners of each kind are uniform; the other half are reached
    by a short random walk so that near and adjacency queries also hit pairs
    that are close in the graph.
    """
    rng = random.Random(seed)
    n = g.n
    und = g.und
    work = []
    for i in range(count):
        u = rng.randrange(n)
        steps = 1 if i % 2 == 0 else rng.randint(1, t)
        if (i // 2) % 2 == 0:
            v = rng.randrange(n)
        else:
            v = u
            for _ in range(steps):
                if und[v]:
                    v = rng.choice(und[v])
        kind = "adj" if i % 2 == 0 else "near"
        work.append((kind, labels[u], labels[v]))
    return work


def time_queries(engine: QueryEngine, work: list[tuple], t: int) -> dict:
    """Median wall time per query (seconds), overall and per kind."""
    times = {"adj": [], "near": []}
    clock = time.perf_counter
    for kind, a, b in work:
        if kind == "adj":
            s = clock()
            engine.adjacent(a, b)
            times["adj"].append(clock() - s)
        else:
            s = clock()
            engine.near(a, b, t)
            times["near"].append(clock() - s)
    every = times["adj"] + times["near"]
    return {
        "median": statistics.median(every),
        "adj_median": statistics.median(times["adj"]) if times["adj"] else 0.0,
        "near_median": statistics.median(times["near"]) if times["near"] else 0.0,
        "queries": len(every),
    }


def query_row(kind: str, n: int, count: int, t: int = config.DEFAULT_T, seed: int = 0) -> dict:
    g = corpus.generate(kind, n, seed=seed)
    enc = encode_base(g)
    archive = assemble(enc, build_sections(enc, ["adj", f"nr{t}", "lbl"], t))
    back = Archive.from_bytes(archive.to_bytes())
    engine = QueryEngine(back)
    work = query_workload(g, back.sidecar, count, t, seed)
    res = time_queries(engine, work, t)
    return {
        "kind": kind,
        "n": n,
        "queries": res["queries"],
        "median_us": round(res["median"] * 1e6, 2),
        "adj_median_us": round(res["adj_median"] * 1e6, 2),
        "near_median_us": round(res["near_median"] * 1e6, 2),
    }
