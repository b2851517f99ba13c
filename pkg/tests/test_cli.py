import io
import json
import subprocess
import sys

import pytest

from maxleaf.cli import main
from maxleaf.digraph import parse_digraph
from maxleaf.outtree import OutTree, parse_witness


def run_cli(argv, stdin_text=None, capsys=None, monkeypatch=None):
    if stdin_text is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cycle4_file(tmp_path):
    f = tmp_path / "cycle4.dg"
    f.write_text("4 4\n0 1\n1 2\n2 3\n3 0\n")
    return str(f)


@pytest.fixture
def star3_file(tmp_path):
    f = tmp_path / "star3.dg"
    f.write_text("4 3\n0 1\n0 2\n0 3\n")
    return str(f)


class TestSolve:
    def test_no_decision_exit_1(self, cycle4_file, capsys):
        code, out, _ = run_cli(
            ["solve", "--mode", "branching", "-k", "2", cycle4_file], capsys=capsys
        )
        assert code == 1 and "NO" in out

    def test_yes_json(self, star3_file, capsys):
        code, out, _ = run_cli(
            ["solve", "--mode", "tree", "-k", "3", "--json", star3_file], capsys=capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["decision"] == "YES" and doc["k"] == 3
        assert doc["stats"]["n"] == 4
        assert doc["timings"]["nondeterministic"] is True

    def test_witness_file(self, star3_file, capsys, tmp_path):
        wpath = tmp_path / "w.txt"
        code, _, _ = run_cli(
            ["solve", "--mode", "tree", "-k", "3", "--witness", str(wpath), star3_file],
            capsys=capsys,
        )
        assert code == 0
        tree = parse_witness(wpath.read_text())
        assert tree.leaf_count >= 3

    def test_stdin_dash(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            ["solve", "--mode", "tree", "-k", "1", "-"],
            stdin_text="3 2\n0 1\n1 2\n",
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0 and "YES" in out

    def test_usage_error_exit_2(self, capsys):
        assert main(["solve", "--mode", "nonsense", "-k", "1", "x"]) == 2
        assert main(["solve", "--bogus-flag", "x"]) == 2

    def test_missing_file_exit_2(self, capsys):
        code, _, err = run_cli(
            ["solve", "--mode", "tree", "-k", "1", "/nonexistent.dg"], capsys=capsys
        )
        assert code == 2

    def test_bad_input_exit_2(self, tmp_path, capsys):
        f = tmp_path / "bad.dg"
        f.write_text("2 1\n0 0\n")
        code, _, err = run_cli(["solve", "--mode", "tree", "-k", "1", str(f)], capsys=capsys)
        assert code == 2 and "SelfLoop" in err


class TestExact:
    def test_star_value(self, star3_file, capsys):
        code, out, _ = run_cli(["exact", "--mode", "tree", star3_file], capsys=capsys)
        assert code == 0 and out.startswith("l = 3")

    def test_json_mirrors_solve_schema(self, cycle4_file, capsys):
        code, out, _ = run_cli(
            ["exact", "--mode", "branching", "--json", cycle4_file], capsys=capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["route"] == "oracle" and doc["value"] == 1
        assert set(doc) >= {"problem", "k", "decision", "route", "stats", "witness"}

    def test_no_branching_exit_1(self, tmp_path, capsys):
        f = tmp_path / "nb.dg"
        f.write_text("3 1\n0 1\n")
        code, _, _ = run_cli(["exact", "--mode", "branching", str(f)], capsys=capsys)
        assert code == 1


class TestGenAndRoundTrips:
    def test_gen_parses(self, capsys):
        code, out, _ = run_cli(
            ["gen", "--family", "scc-indeg3", "--n", "20", "--seed", "7"], capsys=capsys
        )
        assert code == 0
        d = parse_digraph(out)
        assert d.n == 20

    def test_gen_seed_required(self, capsys):
        assert main(["gen", "--family", "cycle", "--n", "5"]) == 2

    def test_gen_then_solve_pipe(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            ["gen", "--family", "scc-indeg3", "--n", "20", "--seed", "7"], capsys=capsys
        )
        code, out2, _ = run_cli(
            ["solve", "--mode", "branching", "-k", "2", "-"],
            stdin_text=out,
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0 and "YES" in out2

    def test_preprocess(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            ["preprocess", "--remove-useless", "-"],
            stdin_text="3 3\n0 1\n1 2\n2 1\n",
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0
        assert parse_digraph(out).arcs == ((0, 1), (1, 2))

    def test_check_td_round_trip(self, tmp_path, capsys):
        from maxleaf.decomposition import build_tree_decomposition, dump_tree_decomposition
        from maxleaf.digraph import Digraph
        from maxleaf.outtree import OutTree as OT

        d = Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)])
        t = OT(d, 0, {1: 0, 2: 1, 3: 2})
        td = build_tree_decomposition(d, t)
        tdfile = tmp_path / "t.td"
        tdfile.write_text(dump_tree_decomposition(td))
        dgfile = tmp_path / "t.dg"
        dgfile.write_text("4 5\n0 1\n1 2\n2 3\n3 0\n2 1\n")
        code, out, _ = run_cli(["check-td", str(tdfile), str(dgfile)], capsys=capsys)
        assert code == 0 and "valid" in out

    def test_check_td_rejects_broken(self, tmp_path, capsys):
        tdfile = tmp_path / "t.td"
        tdfile.write_text("root 0\nnode 0: 0 1\nnode 1: 1 2\nedge 0 1\n")
        dgfile = tmp_path / "t.dg"
        dgfile.write_text("4 3\n0 1\n1 2\n2 3\n")
        code, out, _ = run_cli(["check-td", str(tdfile), str(dgfile)], capsys=capsys)
        assert code == 1 and "INVALID" in out


class TestBound:
    def test_backheads(self, capsys, monkeypatch):
        code, out, err = run_cli(
            ["bound", "--which", "backheads", "-"],
            stdin_text="4 5\n0 1\n1 2\n2 3\n3 0\n2 1\n",
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0
        tree = parse_witness(out)
        assert tree.leaf_count >= 2

    def test_thm3(self, capsys, monkeypatch):
        from maxleaf.digraph import serialize_digraph
        from maxleaf.generators import GeneratorSpec, generate

        text = serialize_digraph(generate(GeneratorSpec("ratio-gap-search", 6, seed=0)))
        code, out, err = run_cli(
            ["bound", "--which", "thm3", "-"],
            stdin_text=text,
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0 and "conversion case" in err

    def test_sqrt(self, capsys, monkeypatch):
        from maxleaf.digraph import serialize_digraph
        from maxleaf.generators import GeneratorSpec, generate

        text = serialize_digraph(generate(GeneratorSpec("scc-indeg3", 50, seed=1)))
        code, out, _ = run_cli(
            ["bound", "--which", "sqrt", "-"],
            stdin_text=text,
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        assert code == 0
        tree = parse_witness(out)
        assert len(tree) == 50 and tree.leaf_count >= 2

    def test_path(self, capsys, monkeypatch):
        from maxleaf.digraph import serialize_digraph
        from maxleaf.generators import GeneratorSpec, generate

        text = serialize_digraph(generate(GeneratorSpec("scc-indeg3", 40, seed=2)))
        code, out, err = run_cli(
            ["bound", "--which", "path", "-"],
            stdin_text=text,
            capsys=capsys,
            monkeypatch=monkeypatch,
        )
        # either a witness or a clean refusal when no usable path exists
        assert code in (0, 1)


class TestBench:
    def test_quick_suite(self, capsys):
        code, _, err = run_cli(["bench", "--suite", "quick"], capsys=capsys)
        assert code == 0 and "solve" in err

    def test_unknown_suite(self, capsys):
        code, _, _ = run_cli(["bench", "--suite", "nope"], capsys=capsys)
        assert code == 2


class TestEntryPoint:
    def test_module_invocation(self, star3_file):
        proc = subprocess.run(
            [sys.executable, "-m", "maxleaf.cli", "exact", "--mode", "tree", star3_file],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and proc.stdout.startswith("l = 3")
