"""Brute-force exact solvers for desk-scale instances.

These are the ground truth the fast solvers are tested against, so they
stay independent of the tree-decomposition machinery.  The exact values
come from a dynamic program over vertex subsets that provably considers
every out-tree; `enumerate_out_branchings` is a literal enumeration used
to cross-check the subset DP on even smaller instances.
"""

from __future__ import annotations

from .digraph import Digraph, reachable_set, strong_components
from .errors import NoOutBranching, TooLarge
from .outtree import OutTree

EXACT_GUARD = 10
ENUMERATION_GUARD = 8


def enumerate_out_branchings(d: Digraph) -> list[OutTree]:
    """Every spanning out-branching, ordered by (root, parent vector).

    Exhausts parent choices per vertex in ascending order with incremental
    cycle pruning.
    """
    if d.n > ENUMERATION_GUARD:
        raise TooLarge(f"enumeration is guarded to n <= {ENUMERATION_GUARD}")
    if d.n == 0:
        return []
    scc = strong_components(d)
    initial = scc.initial_components()
    if len(initial) != 1:
        return []
    roots = initial[0]
    n = d.n
    result: list[OutTree] = []
    for root in roots:
        others = [v for v in range(n) if v != root]
        parent: dict[int, int] = {}

        def assign(i: int) -> None:
            if i == len(others):
                result.append(OutTree(d, root, parent, validate=False))
                return
            v = others[i]
            for u in d.in_neighbors(v):
                w = u  # adding (u, v) closes a cycle iff v is an ancestor of u
                while w != v and w != root and w in parent:
                    w = parent[w]
                if w == v:
                    continue
                parent[v] = u
                assign(i + 1)
                del parent[v]

        assign(0)
    return result


class _LeafTables:
    """Subset DP: best leaf counts of out-trees over every (vertex set, root).

    g[v][S] is the maximum leaf count of an out-tree with vertex set S
    (a bitmask containing v) rooted at v.  A tree splits canonically into
    the child subtree containing the smallest remaining vertex plus the
    rest, which keeps every decomposition counted once.
    """

    def __init__(self, d: Digraph):
        n = d.n
        self.n = n
        out_mask = [0] * n
        for u in range(n):
            for v in d.out_neighbors(u):
                out_mask[u] |= 1 << v
        self.out_mask = out_mask
        self.g: list[dict[int, int]] = [dict() for _ in range(n)]
        self.g_sub: list[dict[int, int]] = [dict() for _ in range(n)]
        self.forest: dict[tuple[int, int], int] = {}
        self.forest_choice: dict[tuple[int, int], tuple[int, int]] = {}
        for mask in range(1, 1 << n):
            rest = mask
            while rest:
                bit = rest & (-rest)
                rest ^= bit
                v = bit.bit_length() - 1
                if mask == bit:
                    self.g[v][mask] = 1
                    continue
                val = self._forest(mask ^ bit, v)
                if val >= 0:
                    self.g[v][mask] = val

    def _forest(self, f: int, v: int) -> int:
        """Best total leaves of a forest on set f whose roots are out-neighbors of v."""
        key = (f, v)
        cached = self.forest.get(key)
        if cached is not None:
            return cached
        m = f & (-f)
        best = -1
        choice = (0, -1)
        sub = f
        while True:
            if sub & m:
                roots = sub & self.out_mask[v]
                if roots:
                    rest = f ^ sub
                    rest_val = 0 if rest == 0 else self._forest(rest, v)
                    if rest_val >= 0:
                        rr = roots
                        while rr:
                            ub = rr & (-rr)
                            rr ^= ub
                            u = ub.bit_length() - 1
                            gv = self.g[u].get(sub, -1)
                            if gv >= 0 and gv + rest_val > best:
                                best = gv + rest_val
                                choice = (sub, u)
            if sub == 0:
                break
            sub = (sub - 1) & f
        self.forest[key] = best
        if best >= 0:
            self.forest_choice[key] = choice
        return best

    def tree_arcs(self, mask: int, v: int) -> list[tuple[int, int]]:
        """Reconstruct one optimal tree on (mask, v) from the stored choices."""
        arcs: list[tuple[int, int]] = []
        stack = [(mask, v)]
        while stack:
            s, r = stack.pop()
            f = s ^ (1 << r)
            while f:
                sub, u = self.forest_choice[(f, r)]
                arcs.append((r, u))
                stack.append((sub, u))
                f ^= sub
        return arcs


def _tables(d: Digraph) -> _LeafTables:
    if d.n > EXACT_GUARD:
        raise TooLarge(f"exact oracle is guarded to n <= {EXACT_GUARD}")
    if d.n == 0:
        raise ValueError("empty digraph")
    return _LeafTables(d)


def _tree_from_arcs(d: Digraph, root: int, arcs: list[tuple[int, int]]) -> OutTree:
    return OutTree(d, root, {v: u for u, v in arcs})


def exact_max_leaf_out_tree(d: Digraph, with_witness: bool = True) -> tuple[int, OutTree | None]:
    """Exact maximum leaf count over all non-empty out-trees, with a witness.

    A single vertex is an out-tree with one leaf, so the value is >= 1.
    """
    tables = _tables(d)
    best, best_key = -1, None
    for mask in range(1, 1 << d.n):
        for v in range(d.n):
            if mask >> v & 1:
                val = tables.g[v].get(mask, -1)
                if val > best:
                    best, best_key = val, (mask, v)
    assert best >= 1 and best_key is not None
    if not with_witness:
        return best, None
    mask, v = best_key
    return best, _tree_from_arcs(d, v, tables.tree_arcs(mask, v))


def exact_max_leaf_out_branching(
    d: Digraph, with_witness: bool = True
) -> tuple[int, OutTree | None]:
    """Exact maximum leaf count over spanning out-branchings, with a witness."""
    tables = _tables(d)
    full = (1 << d.n) - 1
    best, best_root = -1, -1
    for v in range(d.n):
        val = tables.g[v].get(full, -1)
        if val > best:
            best, best_root = val, v
    if best < 0:
        raise NoOutBranching("no spanning out-tree exists")
    if not with_witness:
        return best, None
    return best, _tree_from_arcs(d, best_root, tables.tree_arcs(full, best_root))


def exact_values(d: Digraph) -> tuple[int, int | None]:
    """(max out-tree leaves, max out-branching leaves or None) in one DP pass."""
    tables = _tables(d)
    best_tree = -1
    for mask in range(1, 1 << d.n):
        for v in range(d.n):
            if mask >> v & 1:
                val = tables.g[v].get(mask, -1)
                if val > best_tree:
                    best_tree = val
    full = (1 << d.n) - 1
    best_span = max((tables.g[v].get(full, -1) for v in range(d.n)), default=-1)
    return best_tree, (best_span if best_span >= 0 else None)


def enumerate_out_trees(d: Digraph) -> list[OutTree]:
    """All non-empty out-trees, via branching enumeration on induced subgraphs.

    Intentionally naive; only used to cross-check the subset DP.
    """
    if d.n > 6:
        raise TooLarge("out-tree enumeration is guarded to n <= 6")
    seen: list[OutTree] = []
    for mask in range(1, 1 << d.n):
        verts = [v for v in range(d.n) if mask >> v & 1]
        sub, old_ids = d.induced(verts)
        if len(verts) == 1:
            seen.append(OutTree(d, verts[0], {}))
            continue
        for t in enumerate_out_branchings(sub):
            parent = {old_ids[v]: old_ids[p] for v, p in t.parent.items()}
            seen.append(OutTree(d, old_ids[t.root], parent, validate=False))
    return seen
