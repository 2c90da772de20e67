from __future__ import annotations

import io
import random
import subprocess
import sys

import pytest

from slimgraph import corpus
from slimgraph.cli import main
from slimgraph.graph import graph_to_text, parse_graph_text

from .oracles import distances_within, is_path, to_nx, undirected_neighbors

PATH3 = "3 2 undirected\n0 1\n1 2\n"


def run(argv, stdin=None):
    out = io.StringIO()
    code = main(argv, out=out, stdin=io.StringIO(stdin) if stdin is not None else None)
    return code, out.getvalue()


@pytest.fixture
def path_archive(tmp_path):
    src = tmp_path / "p.txt"
    src.write_text(PATH3)
    arc = tmp_path / "p.slim"
    code, report = run(["encode", "--in", str(src), "--out", str(arc)])
    assert code == 0
    return arc, report


def test_encode_report_is_one_key_value_line(path_archive):
    _, report = path_archive
    lines = report.splitlines()
    assert len(lines) == 1
    fields = dict(kv.split("=") for kv in lines[0].split())
    assert fields["n"] == "3" and int(fields["payload_bits"]) > 0
    assert {"section_DEG", "section_ADJ", "section_NR3", "section_LBL"} <= set(fields)


def test_encode_then_decode_path(path_archive, tmp_path):
    arc, _ = path_archive
    code, text = run(["decode", "--in", str(arc)])
    assert code == 0 and parse_graph_text(text).same_as(parse_graph_text(PATH3))
    out = tmp_path / "back.txt"
    code, report = run(["decode", "--in", str(arc), "--out", str(out), "--format", "text"])
    assert code == 0 and report.startswith("n=3 arcs=4")
    assert parse_graph_text(out.read_text()).same_as(parse_graph_text(PATH3))


def test_requested_sections_only(tmp_path):
    src = tmp_path / "p.txt"
    src.write_text(PATH3)
    arc = tmp_path / "p.slim"
    _, report = run(["encode", "--in", str(src), "--out", str(arc), "--sections", "deg,adj,nr3"])
    tags = {k[len("section_"):] for k in dict(kv.split("=") for kv in report.split()) if k.startswith("section_")}
    assert tags == {"DEG", "ADJ", "NR3"}


def test_query_examples(path_archive):
    arc, _ = path_archive
    assert run(["query", "--in", str(arc), "deg", "1"]) == (0, "2\n")
    assert run(["query", "--in", str(arc), "near", "0", "2", "3"]) == (0, "0 1 2\n")
    assert run(["query", "--in", str(arc), "near", "0", "2", "1"]) == (0, "none\n")
    assert run(["query", "--in", str(arc), "nbrs", "1"]) == (0, "0 2\n")
    assert run(["query", "--in", str(arc), "adj", "0", "2"]) == (0, "0\n")


def test_batch_queries_match_graph(tmp_path):
    g = corpus.generate("grid", 100, seed=1, colors=2)
    src = tmp_path / "g.txt"
    src.write_text(graph_to_text(g))
    arc = tmp_path / "g.slim"
    assert run(["encode", "--in", str(src), "--out", str(arc)])[0] == 0
    lines, want = [], []
    for u in range(0, 100, 7):
        lines += [f"deg {u}", f"color {u}", f"nbrs {u}", f"adj {u} {(u + 1) % 100}"]
        want += [str(len(g.und[u])), str(g.colors[u]), " ".join(map(str, g.und[u])),
                 "1" if g.has_arc(u, (u + 1) % 100) else "0"]
    code, out = run(["query", "--in", str(arc)], stdin="# header\n" + "\n".join(lines) + "\n")
    assert code == 0 and out.splitlines() == want


def test_corrupt_archive_fails_with_one_line(path_archive, tmp_path, capsys):
    arc, _ = path_archive
    bad = tmp_path / "bad.slim"
    bad.write_bytes(arc.read_bytes()[:25])
    code, _ = run(["decode", "--in", str(bad)])
    err = capsys.readouterr().err
    assert code != 0 and len(err.splitlines()) == 1 and err.startswith("error=")


@pytest.mark.parametrize("argv", [
    ["query", "--in", "{arc}", "deg", "9"],
    ["query", "--in", "{arc}", "walk", "1"],
    ["query", "--in", "{arc}", "near", "0", "1"],
    ["bogus"],
    ["decode", "--in", "/nonexistent/file"],
    ["encode", "--kind", "tree"],
])
def test_failures_are_single_lines(path_archive, capsys, argv):
    arc, _ = path_archive
    code, _ = run([a.format(arc=arc) for a in argv])
    err = capsys.readouterr().err
    assert code != 0 and len(err.splitlines()) == 1 and err.startswith("error=")


def test_missing_section_is_reported(tmp_path, capsys):
    src = tmp_path / "p.txt"
    src.write_text(PATH3)
    arc = tmp_path / "p.slim"
    run(["encode", "--in", str(src), "--out", str(arc), "--sections", "deg,lbl"])
    code, _ = run(["query", "--in", str(arc), "adj", "0", "1"])
    assert code == 1 and "SectionError" in capsys.readouterr().err


def test_colors_survive_the_round_trip(tmp_path):
    g = corpus.generate("maximal-planar", 60, seed=3, colors=5)
    src = tmp_path / "g.txt"
    src.write_text(graph_to_text(g))
    arc = tmp_path / "g.slim"
    run(["encode", "--in", str(src), "--out", str(arc), "--sections", "none"])
    _, text = run(["decode", "--in", str(arc)])
    assert parse_graph_text(text).colors == g.colors


def test_output_is_byte_identical_across_runs(tmp_path):
    outs = []
    for i in range(2):
        arc = tmp_path / f"t{i}.slim"
        _, report = run(["encode", "--kind", "tree", "--n", "500", "--seed", "4", "--out", str(arc)])
        outs.append((report.replace(str(arc), ""), arc.read_bytes()))
    assert outs[0] == outs[1]


def test_verify_passes_and_names_injected_fault():
    code, out = run(["verify", "--kind", "grid", "--n", "144", "--samples", "30"])
    assert code == 0 and out.splitlines()[-1].startswith("result=pass")
    code, out = run(["verify", "--kind", "tree", "--n", "80", "--samples", "20", "--inject", "orientation"])
    assert code == 1
    assert "check=director.orientation status=fail" in out
    again = run(["verify", "--kind", "tree", "--n", "80", "--samples", "20", "--inject", "orientation"])[1]
    assert again == out


def test_debug_entries():
    code, out = run(["verify-partition", "--kind", "tree", "--n", "500"])
    assert code == 0 and "check=partition.star_codec status=pass" in out
    code, out = run(["verify-director", "--kind", "grid", "--n", "64", "--t", "2"])
    assert code == 0 and out.count("check=director.directive status=pass") == 2


def test_bench_tables():
    code, out = run(["bench", "--kind", "tree", "--n", "256", "--queries", "20"])
    rows = [dict(kv.split("=") for kv in line.split()) for line in out.splitlines()]
    assert code == 0 and [r["table"] for r in rows] == ["size", "query"]
    assert rows[0]["roundtrip"] == "ok" and float(rows[1]["median_us"]) > 0


def test_console_script_entry_point(tmp_path):
    src = tmp_path / "p.txt"
    src.write_text(PATH3)
    arc = tmp_path / "p.slim"
    subprocess.run([sys.executable, "-m", "slimgraph.cli", "encode", "--in", str(src), "--out", str(arc)], check=True,
                   capture_output=True)
    res = subprocess.run([sys.executable, "-m", "slimgraph.cli", "query", "--in", str(arc), "deg", "0"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "1\n"


def test_hundred_thousand_batch_queries_match_oracle(tmp_path):
    g = corpus.generate("tree", 1024, seed=8, colors=4)
    src = tmp_path / "g.txt"
    src.write_text(graph_to_text(g))
    arc = tmp_path / "g.slim"
    assert run(["encode", "--in", str(src), "--out", str(arc)])[0] == 0
    d = to_nx(g)
    rng = random.Random(8)
    lines = []
    for i in range(100_000):
        u, v = rng.randrange(g.n), rng.randrange(g.n)
        if i % 2:
            v = u
            for _ in range(rng.randint(0, 3)):
                v = rng.choice(g.und[v])
        op = ("deg", "color", "nbrs", "adj", "near")[i % 5]
        lines.append({"deg": f"deg {u}", "color": f"color {u}", "nbrs": f"nbrs {u}",
                      "adj": f"adj {u} {v}", "near": f"near {u} {v} {1 + i % 3}"}[op])
    code, out = run(["query", "--in", str(arc)], stdin="\n".join(lines) + "\n")
    answers = out.splitlines()
    assert code == 0 and len(answers) == len(lines)
    for q, a in zip(lines, answers):
        op, *args = q.split()
        u = int(args[0])
        if op == "deg":
            assert int(a) == len(undirected_neighbors(d, u))
        elif op == "color":
            assert int(a) == g.colors[u]
        elif op == "nbrs":
            assert [int(x) for x in a.split()] == sorted(undirected_neighbors(d, u))
        elif op == "adj":
            assert a == ("1" if d.has_edge(u, int(args[1])) else "0")
        else:
            v, t = int(args[1]), int(args[2])
            dist = distances_within(d, u, t).get(v)
            if dist is None:
                assert a == "none"
            else:
                path = [int(x) for x in a.split()]
                assert len(path) - 1 == dist and path[0] == u and path[-1] == v and is_path(d, path)
