"""Command-line front end.

    slimgraph encode --in graph.txt --out graph.slim [--sections deg,adj,nr3,lbl]
    slimgraph encode --kind tree --n 4096 --seed 1 --out tree.slim
    slimgraph decode --in graph.slim [--out graph.txt]
    slimgraph query --in graph.slim deg 0
    slimgraph query --in graph.slim < queries.txt
    slimgraph verify --kind grid --n 1024
    slimgraph verify --in graph.slim
    slimgraph verify-partition --kind tree --n 4096
    slimgraph verify-director --kind maximal-planar --n 300 --t 3
    slimgraph bench --kind tree,grid --n 4096,16384 --queries 1000

Reports are single lines of space separated key=value pairs.  Failures print
one `error=<kind> reason=<text>` line on stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import sys

from . import config, corpus
from .bench import query_row, size_row
from .codec import Archive, assemble, decode, encode_base, leaf_threshold, part_target
from .errors import SlimError
from .graph import graph_to_text, parse_graph_text
from .query import QueryEngine, build_sections
from .partition import check_star, default_degree_cap, star_partition
from .verify import INJECTIONS, director_checks, partition_checks, run_checks, verify_archive

DEFAULT_SECTIONS = "deg,adj,nr3,lbl"


class CliError(Exception):
    """Bad command-line usage or query text."""


class QueryTextError(CliError):
    """A query line that cannot be answered as written."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _kv(**fields) -> str:
    return " ".join(f"{k}={v}" for k, v in fields.items())


def _load_graph(args):
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            return parse_graph_text(fh.read())
    if args.kind and args.n:
        return corpus.generate(args.kind, _ints(args.n)[0], seed=args.seed, colors=args.colors)
    raise CliError("need --in or both --kind and --n")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x]
    except ValueError:
        raise CliError(f"not an integer list: {text!r}") from None


def _read_archive(path: str) -> Archive:
    with open(path, "rb") as fh:
        return Archive.from_bytes(fh.read())


# commands ----------------------------------------------------------------------

def cmd_encode(args, out) -> int:
    if not args.output:
        raise CliError("encode needs --out")
    g = _load_graph(args)
    names = [s for s in args.sections.split(",") if s.strip()] if args.sections != "none" else []
    enc = encode_base(g, args.deep)
    archive = assemble(enc, build_sections(enc, names, args.t))
    data = archive.to_bytes()
    with open(args.output, "wb") as fh:
        fh.write(data)
    payload = len(enc.chi) + len(enc.code)
    fields = {
        "n": g.n,
        "arcs": g.num_arcs,
        "payload_bits": payload,
        "bits_per_vertex": f"{payload / g.n:.4f}" if g.n else "0",
        "container_bits": len(archive.container),
        "bytes": len(data),
    }
    for tag, size in archive.section_sizes().items():
        fields[f"section_{tag}"] = size
    print(_kv(**fields), file=out)
    return 0


def cmd_decode(args, out) -> int:
    if not args.input:
        raise CliError("decode needs --in")
    g = decode(_read_archive(args.input))
    text = graph_to_text(g)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(_kv(n=g.n, arcs=g.num_arcs, out=args.output), file=out)
    else:
        out.write(text)
    return 0


class QuerySession:
    """Answers text queries on original vertex ids through the sidecar map."""

    def __init__(self, archive: Archive):
        self.engine = QueryEngine(archive)
        self.label = archive.sidecar
        self.vertex = {lab: v for v, lab in enumerate(self.label)}

    def _lab(self, tok: str) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise QueryTextError(f"vertex id must be an integer, got {tok!r}") from None
        if not 0 <= v < len(self.label):
            raise QueryTextError(f"unknown vertex id {v}")
        return self.label[v]

    def answer(self, line: str) -> str:
        toks = line.split()
        if not toks:
            raise QueryTextError("empty query")
        op, rest = toks[0], toks[1:]
        arity = {"deg": 1, "color": 1, "nbrs": 1, "adj": 2, "near": 3}
        if op not in arity:
            raise QueryTextError(f"unknown query {op!r}")
        if len(rest) != arity[op]:
            raise QueryTextError(f"{op} takes {arity[op]} argument(s)")
        e = self.engine
        if op == "deg":
            return str(e.degree(self._lab(rest[0]))[0])
        if op == "color":
            return str(e.color(self._lab(rest[0])))
        if op == "nbrs":
            return " ".join(str(v) for v in sorted(self.vertex[x] for x in e.neighbors(self._lab(rest[0]))))
        if op == "adj":
            fwd, _ = e.adjacent(self._lab(rest[0]), self._lab(rest[1]))
            return "1" if fwd else "0"
        try:
            t = int(rest[2])
        except ValueError:
            raise QueryTextError(f"distance must be an integer, got {rest[2]!r}") from None
        if t < 0:
            raise QueryTextError("distance must be non-negative")
        u, v = self._lab(rest[0]), self._lab(rest[1])
        if t == 0:
            return str(rest[0]) if u == v else "none"
        path = e.near(u, v, t)
        return "none" if path is None else " ".join(str(self.vertex[x]) for x in path)


def cmd_query(args, out, stdin=None) -> int:
    if not args.input:
        raise CliError("query needs --in")
    session = QuerySession(_read_archive(args.input))
    if args.query:
        print(session.answer(" ".join(args.query)), file=out)
        return 0
    for line in stdin if stdin is not None else sys.stdin:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        print(session.answer(line), file=out)
    return 0


def cmd_verify(args, out) -> int:
    """Invariant report for a graph; an archive given with --in is first
    checked for canonical bytes and then verified through its decoded graph."""
    head = []
    if args.input:
        with open(args.input, "rb") as fh:
            data = fh.read()
        if data[:4] == config.MAGIC:
            head.append(verify_archive(data))
            g = decode(Archive.from_bytes(data))
        else:
            g = parse_graph_text(data.decode("utf-8"))
    else:
        g = _load_graph(args)
    checks = head + run_checks(g, args.t, samples=args.samples, seed=args.seed, inject=args.inject, deep=args.deep)
    failed = _print_checks(checks, out)
    print(_kv(result="pass" if not failed else "fail", checks=len(checks), failed=failed), file=out)
    return 1 if failed else 0


def _print_checks(checks, out) -> int:
    failed = 0
    for c in checks:
        failed += not c.passed
        status = "pass" if c.passed else "fail"
        print(f"check={c.name} status={status} {c.detail}".rstrip(), file=out)
    return failed


def cmd_verify_partition(args, out) -> int:
    g = _load_graph(args)
    failed = _print_checks(partition_checks(g), out)
    n = g.n
    if n > 1:
        sp = star_partition(g, quotient_size=n, leaf_size=part_target(n, leaf_threshold(n)),
                            degree_cap=default_degree_cap(n))
        rep = check_star(g, sp)
        ok = rep["covered"] and rep["S1"] and rep["S2"]
        failed += not ok
        detail = " ".join(f"{k}={round(v, 4) if isinstance(v, float) else v}" for k, v in rep.items())
        print(f"check=partition.star_codec status={'pass' if ok else 'fail'} {detail}", file=out)
    return 1 if failed else 0


def cmd_verify_director(args, out) -> int:
    g = _load_graph(args)
    failed = 0
    for t in range(1, args.t + 1):
        failed += _print_checks(director_checks(g, t, inject=args.inject), out)
    return 1 if failed else 0


def cmd_bench(args, out) -> int:
    if not args.kind or not args.n:
        raise CliError("bench needs --kind and --n")
    kinds = [k for k in args.kind.split(",") if k]
    sizes = _ints(args.n)
    for kind in kinds:
        for n in sizes:
            print(_kv(table="size", **size_row(kind, n, args.seed, args.deep)), file=out, flush=True)
    if args.queries:
        for kind in kinds:
            for n in sizes:
                print(_kv(table="query", **query_row(kind, n, args.queries, args.t, args.seed)), file=out, flush=True)
    return 0


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "query": cmd_query,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "verify-partition": cmd_verify_partition,
    "verify-director": cmd_verify_director,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slimgraph", description="Succinct graph encoding and queries.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--in", dest="input")
        s.add_argument("--out", dest="output")
        s.add_argument("--sections", default=DEFAULT_SECTIONS)
        s.add_argument("--t", type=int, default=config.DEFAULT_T)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--kind")
        s.add_argument("--n")
        s.add_argument("--colors", type=int, default=0)
        s.add_argument("--format", choices=["text"], default="text")
        if name == "query":
            s.add_argument("query", nargs="*")
        if name in ("encode", "verify", "bench"):
            s.add_argument("--deep", action="store_true")
        if name == "verify":
            s.add_argument("--samples", type=int, default=200)
        if name in ("verify", "verify-director"):
            s.add_argument("--inject", choices=INJECTIONS)
        if name == "bench":
            s.add_argument("--queries", type=int, default=0)
    return p


def _reason(e: BaseException) -> str:
    return " ".join(str(e).split()) or type(e).__name__


def main(argv=None, out=None, stdin=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise CliError("missing command; one of " + ",".join(COMMANDS))
        if args.t < 1:
            raise CliError("--t must be at least 1")
        if args.command == "query":
            return cmd_query(args, out, stdin)
        return COMMANDS[args.command](args, out)
    except QueryTextError as e:
        print(f"error=query reason={_reason(e)}", file=sys.stderr)
        return 1
    except CliError as e:
        print(f"error=usage reason={_reason(e)}", file=sys.stderr)
        return 2
    except SlimError as e:
        print(f"error={type(e).__name__} reason={_reason(e)}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error=io reason={_reason(e)}", file=sys.stderr)
        return 1
    except (ValueError, IndexError, KeyError) as e:
        print(f"error={type(e).__name__} reason={_reason(e)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
