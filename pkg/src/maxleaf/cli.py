"""Command-line front end.

Subcommands: solve, exact, gen, preprocess, check-td, bound, bench.
Exit codes: 0 success, 1 for a NO decision (or failed validation), 2 for
usage or input errors.  "-" reads the digraph from stdin.  All randomness
flows through --seed; timings go to stderr unless --json asked for them.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .bounds import (
    leafy_out_branching_bounds,
    leafy_out_tree_from_path,
    leafy_out_tree_min_indegree,
    out_branching_from_out_tree,
    out_tree_from_back_heads,
    _branch_free_paths,
)
from .decomposition import (
    build_tree_decomposition,
    dump_tree_decomposition,
    max_back_head_count,
    parse_tree_decomposition,
    validate_tree_decomposition,
)
from .digraph import (
    Digraph,
    parse_digraph,
    remove_useless_arcs,
    serialize_digraph,
    strong_components,
)
from .errors import MaxleafError, NoOutBranching
from .generators import FAMILIES, GeneratorSpec, generate
from .oracle import exact_max_leaf_out_branching, exact_max_leaf_out_tree
from .outtree import one_optimal_out_branching, witness_text
from .solver import solve_k_leaf_out_branching, solve_k_leaf_out_tree

USAGE_ERROR = 2
DECISION_NO = 1


def _read_digraph(path: str) -> Digraph:
    if path == "-":
        return parse_digraph(sys.stdin.read())
    with open(path, "rb") as fh:
        return parse_digraph(fh.read())


def _cmd_solve(args) -> int:
    d = _read_digraph(args.file)
    solver = solve_k_leaf_out_tree if args.mode == "tree" else solve_k_leaf_out_branching
    t0 = time.perf_counter()
    report = solver(d, args.k, threads=args.threads)
    elapsed = time.perf_counter() - t0
    if args.json:
        print(report.to_json(include_timings=True))
    else:
        print(f"problem: {report.problem}")
        print(f"k: {report.k}")
        print(f"decision: {report.decision}")
        print(f"route: {report.route}")
        if report.witness is not None:
            print(f"witness leaves: {report.witness.leaf_count}")
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    if args.witness and report.witness is not None:
        with open(args.witness, "w") as fh:
            fh.write(witness_text(report.witness))
    return 0 if report.decision == "YES" else DECISION_NO


def _cmd_exact(args) -> int:
    d = _read_digraph(args.file)
    try:
        if args.mode == "tree":
            value, wit = exact_max_leaf_out_tree(d)
            problem = "max-leaf-out-tree"
        else:
            value, wit = exact_max_leaf_out_branching(d)
            problem = "max-leaf-out-branching"
    except NoOutBranching:
        doc = {
            "problem": "max-leaf-out-branching",
            "k": None,
            "value": None,
            "decision": "NO",
            "route": "oracle",
            "stats": {"width": None, "max_back_heads": None, "n": d.n, "m": d.m},
            "witness": None,
        }
        print(json.dumps(doc) if args.json else "no out-branching exists")
        return DECISION_NO
    if args.json:
        entries = [["root", wit.root]]
        entries += [[int(a), int(b)] for ln in witness_text(wit).splitlines()[1:] for a, b in [ln.split()]]
        doc = {
            "problem": problem,
            "k": None,
            "value": value,
            "decision": "YES",
            "route": "oracle",
            "stats": {"width": None, "max_back_heads": None, "n": d.n, "m": d.m},
            "witness": entries,
        }
        print(json.dumps(doc))
    else:
        print(f"l = {value}")
        sys.stdout.write(witness_text(wit))
    return 0


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(args.family, args.n, seed=args.seed, p=args.p)
    sys.stdout.write(serialize_digraph(generate(spec)))
    return 0


def _cmd_preprocess(args) -> int:
    if not args.remove_useless:
        print("nothing to do: pass --remove-useless", file=sys.stderr)
        return USAGE_ERROR
    d = _read_digraph(args.file)
    sys.stdout.write(serialize_digraph(remove_useless_arcs(d)))
    return 0


def _cmd_check_td(args) -> int:
    with open(args.tdfile) as fh:
        td = parse_tree_decomposition(fh.read())
    d = _read_digraph(args.dgfile)
    report = validate_tree_decomposition(d, td)
    if report.ok:
        print(f"valid tree decomposition, width {td.width}")
        return 0
    print(f"INVALID: axiom {report.axiom}: {report.detail}")
    return DECISION_NO


def _cmd_bound(args) -> int:
    d = _read_digraph(args.file)
    trace: list = []
    if args.which == "backheads":
        comp = strong_components(d).initial_components()
        if len(comp) != 1:
            print("no out-branching exists", file=sys.stderr)
            return DECISION_NO
        tree = one_optimal_out_branching(d, comp[0][0])
        z, heads = max_back_head_count(d, tree)
        out = out_tree_from_back_heads(d, tree, z)
        print(f"# {heads} back-arc heads at vertex {z}", file=sys.stderr)
    elif args.which == "thm3":
        comp = strong_components(d).initial_components()
        if len(comp) != 1:
            print("no out-branching exists", file=sys.stderr)
            return DECISION_NO
        reduced = remove_useless_arcs(d)
        r = strong_components(reduced).initial_components()[0][0]
        tree = one_optimal_out_branching(reduced, r)
        z, heads = max_back_head_count(reduced, tree)
        leafy = out_tree_from_back_heads(reduced, tree, z)
        out = out_branching_from_out_tree(reduced, leafy, assume_no_useless=True, trace=trace)
        print(
            f"# out-tree had {leafy.leaf_count} leaves; conversion case: {trace[0].case}",
            file=sys.stderr,
        )
    elif args.which == "path":
        comp = strong_components(d).initial_components()
        if len(comp) != 1:
            print("no out-branching exists", file=sys.stderr)
            return DECISION_NO
        tree = one_optimal_out_branching(d, comp[0][0])
        best = None
        for chain in _branch_free_paths(tree):
            usable = chain[1:] if chain[0] == tree.root else chain
            if best is None or len(usable) > len(best):
                best = usable
        if not best:
            print("no usable branch-free path", file=sys.stderr)
            return DECISION_NO
        out = leafy_out_tree_from_path(d, tree, best, trace=trace)
        tr = trace[0]
        acted = sum(1 for s in tr.stages if s.acted)
        print(f"# path length {len(best)}, {acted} acting stages, kept {tr.kept_component}", file=sys.stderr)
        for s in tr.stages:
            if s.acted:
                print(f"# stage {s.index}: q={s.q} white={s.whitened} green={s.greened}", file=sys.stderr)
    else:  # sqrt
        out = leafy_out_branching_bounds(d, trace=trace)
    sys.stdout.write(witness_text(out))
    print(f"# leaves: {out.leaf_count}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    if args.suite == "solve-sparse":
        timings = {}
        for n in (1000, 10000):
            d = generate(GeneratorSpec("scc-indeg3", n, seed=9))
            t0 = time.perf_counter()
            rt = solve_k_leaf_out_tree(d, 4)
            rb = solve_k_leaf_out_branching(d, 4)
            timings[n] = time.perf_counter() - t0
            print(f"n={n}: {timings[n]:.2f}s tree={rt.decision} branching={rb.decision}", file=sys.stderr)
        ratio = timings[10000] / max(timings[1000], 1e-3)
        print(f"scaling ratio (10x n): {ratio:.1f}x", file=sys.stderr)
        return 0
    if args.suite == "quick":
        d = generate(GeneratorSpec("scc-indeg3", 200, seed=9))
        t0 = time.perf_counter()
        solve_k_leaf_out_tree(d, 4)
        print(f"n=200 solve: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
        return 0
    print(f"unknown suite {args.suite!r}", file=sys.stderr)
    return USAGE_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxleaf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide k leaves, with witness")
    p.add_argument("--mode", choices=("tree", "branching"), required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--witness", metavar="PATH")
    p.add_argument("--threads", type=int, default=1, metavar="N")
    p.add_argument("file")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("exact", help="brute-force optimum (small n)")
    p.add_argument("--mode", choices=("tree", "branching"), required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("gen", help="write a seeded digraph")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("preprocess", help="rewrite the digraph")
    p.add_argument("--remove-useless", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("check-td", help="validate a tree decomposition dump")
    p.add_argument("tdfile")
    p.add_argument("dgfile")
    p.set_defaults(func=_cmd_check_td)

    p = sub.add_parser("bound", help="run a constructive bound, emit witness")
    p.add_argument("--which", choices=("backheads", "thm3", "path", "sqrt"), required=True)
    p.add_argument("file")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("bench", help="performance smoke suites")
    p.add_argument("--suite", required=True)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except MaxleafError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
