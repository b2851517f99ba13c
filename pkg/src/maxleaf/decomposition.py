"""Back-arc grouping over an out-branching, bag construction along the
tree skeleton, and tree-decomposition validation.

A non-tree arc whose head is a proper tree ancestor of its tail is a
back arc; it is charged to every vertex z strictly below the head and
weakly above the tail, and its head joins the bag of each such z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .digraph import Arc, Digraph
from .errors import NotOneOptimal
from .outtree import OutTree, one_optimality_violation


@dataclass
class BackArcIndex:
    """Per-vertex back-arc lists and deduplicated head sets."""

    arcs_of: list[list[int]]  # vertex -> arc indices, input order
    heads_of: list[set[int]]  # vertex -> set of back-arc heads

    @classmethod
    def build(cls, d: Digraph, tree: OutTree) -> "BackArcIndex":
        arcs_of: list[list[int]] = [[] for _ in range(d.n)]
        heads_of: list[set[int]] = [set() for _ in range(d.n)]
        parent = tree.parent
        for idx, (u, v) in enumerate(d.arcs):
            if u not in tree or v not in tree:
                continue
            # charge z on the tree path from u up to (but excluding) v
            w = u
            hit = False
            chain = []
            while True:
                chain.append(w)
                if w == tree.root:
                    break
                w = parent[w]
                if w == v:
                    hit = True
                    break
            if hit:
                for z in chain:
                    arcs_of[z].append(idx)
                    heads_of[z].add(v)
        return cls(arcs_of, heads_of)


def back_arcs(d: Digraph, tree: OutTree, z: int) -> list[Arc]:
    """Arcs (u,v) with v strictly above z and z weakly above u, input order."""
    if z not in tree:
        raise ValueError(f"{z} is not a tree member")
    parent = tree.parent
    # ancestors of z, excluding z itself
    anc = set()
    w = z
    while w != tree.root:
        w = parent[w]
        anc.add(w)
    sub = tree.subtree(z)
    return [(u, v) for (u, v) in d.arcs if v in anc and u in sub]


def max_back_head_count(d: Digraph, tree: OutTree) -> tuple[int, int]:
    """Vertex maximizing the number of distinct back-arc heads, with the
    count; ties broken by smallest vertex id."""
    if d.n == 0:
        raise ValueError("empty digraph")
    index = BackArcIndex.build(d, tree)
    best_z, best = 0, len(index.heads_of[0])
    for z in range(1, d.n):
        c = len(index.heads_of[z])
        if c > best:
            best_z, best = z, c
    return best_z, best


@dataclass
class TreeDecomposition:
    """Bags over an underlying tree; the skeleton's arc directions are
    ignored by the decomposition axioms."""

    skeleton: OutTree
    bags: dict[int, tuple[int, ...]]

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def nodes(self) -> list[int]:
        return sorted(self.bags)


@dataclass
class ValidationReport:
    ok: bool
    axiom: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def build_tree_decomposition(d: Digraph, tree: OutTree) -> TreeDecomposition:
    """Bags over the out-branching itself: X_v takes v, its tree parent,
    all leaves, all branch successors, and the heads of back arcs charged
    to v.  Requires a verified 1-optimal out-branching.
    """
    if not tree.is_spanning() or tree.digraph != d:
        raise ValueError("need an out-branching of the given digraph")
    bad = one_optimality_violation(d, tree)
    if bad is not None:
        raise NotOneOptimal(f"improving legal 1-change exists for arc {bad}")
    index = BackArcIndex.build(d, tree)
    common = set(tree.leaves) | set(tree.branch_successors)
    bags: dict[int, tuple[int, ...]] = {}
    for v in range(d.n):
        bag = {v} | common | index.heads_of[v]
        p = tree.parent.get(v)
        if p is not None:
            bag.add(p)
        bags[v] = tuple(sorted(bag))
    return TreeDecomposition(tree, bags)


def validate_tree_decomposition(d: Digraph, td: TreeDecomposition) -> ValidationReport:
    """Check the three axioms; report the first violation found."""
    nodes = set(td.bags)
    if set(td.skeleton.vertices) != nodes:
        return ValidationReport(False, None, "bags and skeleton nodes disagree")
    covered: set[int] = set()
    for b in td.bags.values():
        covered.update(b)
    for v in range(d.n):
        if v not in covered:
            return ValidationReport(False, 1, f"vertex {v} occurs in no bag")
    bag_sets = {i: set(b) for i, b in td.bags.items()}
    for u, v in d.arcs:
        if not any(u in b and v in b for b in bag_sets.values()):
            return ValidationReport(False, 2, f"arc ({u},{v}) has no common bag")
    # axiom 3: occurrences of each vertex form a connected subtree
    for v in range(d.n):
        occ = {i for i, b in bag_sets.items() if v in b}
        if not occ:
            continue
        tops = 0
        for i in occ:
            p = td.skeleton.parent.get(i)
            if p is None or p not in occ:
                tops += 1
        if tops != 1:
            return ValidationReport(
                False, 3, f"occurrences of vertex {v} form {tops} subtrees"
            )
    return ValidationReport(True)


def dump_tree_decomposition(td: TreeDecomposition) -> str:
    """Text form: one 'node <v>: <sorted bag>' line per node, then the
    skeleton arcs as 'edge <parent> <child>' lines."""
    lines = [f"root {td.skeleton.root}"]
    for i in td.nodes():
        lines.append(f"node {i}: " + " ".join(str(x) for x in td.bags[i]))
    for c in sorted(td.skeleton.parent):
        lines.append(f"edge {td.skeleton.parent[c]} {c}")
    return "\n".join(lines) + "\n"


def parse_tree_decomposition(text: str) -> TreeDecomposition:
    root: int | None = None
    bags: dict[int, tuple[int, ...]] = {}
    parent: dict[int, int] = {}
    for ln in text.split("\n"):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("root "):
            root = int(ln.split()[1])
        elif ln.startswith("node "):
            head, _, rest = ln.partition(":")
            i = int(head.split()[1])
            bags[i] = tuple(sorted(int(x) for x in rest.split()))
        elif ln.startswith("edge "):
            _, p, c = ln.split()
            parent[int(c)] = int(p)
        else:
            raise ValueError(f"unrecognized line {ln!r}")
    if root is None:
        raise ValueError("missing 'root' line")
    skeleton = OutTree(None, root, parent)
    return TreeDecomposition(skeleton, bags)
