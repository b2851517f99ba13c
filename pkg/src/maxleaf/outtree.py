"""Out-trees and out-branchings: the tree order, 1-changes, local search,
extension to spanning trees, and path-batched change application.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping, Sequence

from .digraph import Arc, Digraph, reachable_set
from .errors import (
    ConstructionError,
    NotExtendable,
    QNotFromRoot,
    RootCannotReachAll,
    RootReparent,
    WouldCreateCycle,
)


class OutTree:
    """A rooted tree with all arcs directed away from the root.

    Stored as root plus a parent map over the member vertices.  When a
    host digraph is given, every (parent, child) pair must be one of its
    arcs.  Trees are value-like: mutating operations return new trees.
    """

    __slots__ = ("digraph", "root", "parent", "_children", "_leaves", "_branch", "_brsucc")

    def __init__(
        self,
        digraph: Digraph | None,
        root: int,
        parent: Mapping[int, int],
        validate: bool = True,
    ):
        self.digraph = digraph
        self.root = root
        self.parent: dict[int, int] = dict(parent)
        self._children: dict[int, list[int]] | None = None
        self._leaves: frozenset[int] | None = None
        self._branch: frozenset[int] | None = None
        self._brsucc: frozenset[int] | None = None
        if validate:
            self._validate()

    def _validate(self) -> None:
        if self.root in self.parent:
            raise ValueError("root must not have a parent")
        members = self.vertices
        for v, p in self.parent.items():
            if p not in members:
                raise ValueError(f"parent {p} of {v} is not a member")
            if self.digraph is not None and not self.digraph.has_arc(p, v):
                raise ValueError(f"({p},{v}) is not an arc of the host digraph")
        # reach every member from the root via child lists: catches cycles
        seen = {self.root}
        stack = [self.root]
        kids = self.children_map()
        while stack:
            u = stack.pop()
            for c in kids.get(u, ()):
                if c in seen:
                    raise ValueError("parent structure has a cycle")
                seen.add(c)
                stack.append(c)
        if seen != members:
            raise ValueError("parent structure is disconnected")

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.parent) | {self.root}

    def __len__(self) -> int:
        return len(self.parent) + 1

    def __contains__(self, v: int) -> bool:
        return v == self.root or v in self.parent

    def children_map(self) -> dict[int, list[int]]:
        if self._children is None:
            kids: dict[int, list[int]] = {}
            for v, p in self.parent.items():
                kids.setdefault(p, []).append(v)
            for lst in kids.values():
                lst.sort()
            self._children = kids
        return self._children

    def children(self, v: int) -> list[int]:
        return self.children_map().get(v, [])

    def out_degree(self, v: int) -> int:
        return len(self.children(v))

    def _roles(self) -> None:
        kids = self.children_map()
        leaves, branch = [], []
        for v in self.vertices:
            deg = len(kids.get(v, ()))
            if deg == 0:
                leaves.append(v)
            elif deg >= 2:
                branch.append(v)
        self._leaves = frozenset(leaves)
        self._branch = frozenset(branch)
        self._brsucc = frozenset(
            v for v, p in self.parent.items() if len(kids.get(p, ())) >= 2
        )

    @property
    def leaves(self) -> frozenset[int]:
        if self._leaves is None:
            self._roles()
        return self._leaves

    @property
    def branch_vertices(self) -> frozenset[int]:
        if self._branch is None:
            self._roles()
        return self._branch

    @property
    def branch_successors(self) -> frozenset[int]:
        if self._brsucc is None:
            self._roles()
        return self._brsucc

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    def is_spanning(self) -> bool:
        return self.digraph is not None and len(self) == self.digraph.n

    def has_tree_arc(self, u: int, v: int) -> bool:
        return self.parent.get(v) == u

    def arcs(self) -> list[Arc]:
        return [(p, v) for v, p in self.parent.items()]

    def subtree(self, v: int) -> set[int]:
        """All vertices reachable from v inside the tree, v included."""
        if v not in self:
            raise ValueError(f"{v} is not a member")
        out = {v}
        stack = [v]
        kids = self.children_map()
        while stack:
            u = stack.pop()
            for c in kids.get(u, ()):
                if c not in out:
                    out.add(c)
                    stack.append(c)
        return out

    def path_from_root(self, v: int) -> list[int]:
        if v not in self:
            raise ValueError(f"{v} is not a member")
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def depth(self, v: int) -> int:
        return len(self.path_from_root(v)) - 1

    def bfs_order(self) -> list[int]:
        order = [self.root]
        queue = deque([self.root])
        kids = self.children_map()
        while queue:
            u = queue.popleft()
            for c in kids.get(u, ()):
                order.append(c)
                queue.append(c)
        return order

    def copy(self) -> "OutTree":
        return OutTree(self.digraph, self.root, self.parent, validate=False)

    def __repr__(self) -> str:
        return f"OutTree(root={self.root}, size={len(self)}, leaves={self.leaf_count})"


def tree_leq(tree: OutTree, u: int, v: int) -> bool:
    """True iff v lies in the subtree rooted at u (u is an ancestor-or-self)."""
    if u not in tree or v not in tree:
        raise ValueError("tree_leq arguments must be tree members")
    w = v
    while True:
        if w == u:
            return True
        if w == tree.root:
            return False
        w = tree.parent[w]


def _check_change_preconditions(tree: OutTree, arc: Arc) -> None:
    u, v = arc
    if tree.digraph is None or not tree.digraph.has_arc(u, v):
        raise ValueError(f"({u},{v}) is not an arc of the host digraph")
    if u not in tree or v not in tree:
        raise ValueError("1-change endpoints must be tree members")
    if tree.has_tree_arc(u, v):
        raise ValueError(f"({u},{v}) is already a tree arc")
    if v == tree.root:
        raise RootReparent(f"vertex {v} is the root")


def one_change(tree: OutTree, arc: Arc) -> OutTree:
    """Re-parent the head of ``arc`` onto its tail.

    Valid exactly when the head is not an ancestor of the tail; refuses
    with WouldCreateCycle otherwise.
    """
    _check_change_preconditions(tree, arc)
    u, v = arc
    if tree_leq(tree, v, u):
        raise WouldCreateCycle(f"{v} is an ancestor of {u}")
    parent = dict(tree.parent)
    parent[v] = u
    return OutTree(tree.digraph, tree.root, parent, validate=False)


def is_improving(tree: OutTree, arc: Arc) -> bool:
    """Whether the 1-change for ``arc`` would strictly increase the leaf count."""
    _check_change_preconditions(tree, arc)
    u, v = arc
    return u not in tree.leaves and v not in tree.branch_successors


def one_optimality_violation(d: Digraph, tree: OutTree) -> Arc | None:
    """First non-tree arc (lexicographic) admitting a legal improving 1-change."""
    leaves = tree.leaves
    brsucc = tree.branch_successors
    for u, v in sorted(d.arcs):
        if v == tree.root or tree.has_tree_arc(u, v):
            continue
        if u in leaves or v in brsucc:
            continue
        if not tree_leq(tree, v, u):
            return (u, v)
    return None


def is_one_optimal(d: Digraph, tree: OutTree) -> bool:
    return one_optimality_violation(d, tree) is None


def _bfs_out_branching(d: Digraph, r: int) -> list[int | None]:
    parent: list[int | None] = [None] * d.n
    seen = [False] * d.n
    seen[r] = True
    queue = deque([r])
    while queue:
        u = queue.popleft()
        for v in d.out_neighbors(u):
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                queue.append(v)
    return parent


def _leafy_local_search(d: Digraph, r: int, stop_at: int | None = None) -> tuple[OutTree, bool]:
    """Greedy 1-change ascent from a BFS tree rooted at r.

    Scans non-tree arcs in (tail, head) order and applies the first legal
    improving change, restarting the scan after each one.  When ``stop_at``
    is given, returns as soon as that many leaves exist; the second result
    says whether the tree was verified 1-optimal (no early stop).
    """
    if len(reachable_set(d, r)) != d.n:
        raise RootCannotReachAll(f"vertex {r} does not reach all of V")
    parent = _bfs_out_branching(d, r)
    child_count = [0] * d.n
    for v in range(d.n):
        p = parent[v]
        if p is not None:
            child_count[p] += 1
    arcs_sorted = sorted(d.arcs)
    while True:
        n_leaves = sum(1 for v in range(d.n) if child_count[v] == 0)
        if stop_at is not None and n_leaves >= stop_at:
            return _tree_from_parent_array(d, r, parent), False
        changed = False
        for u, v in arcs_sorted:
            if v == r or parent[v] == u:
                continue
            if child_count[u] == 0:  # tail is a leaf: not improving
                continue
            pv = parent[v]
            if pv is not None and child_count[pv] >= 2:  # head in BrSucc
                continue
            w: int | None = u  # legal iff v is not an ancestor of u
            while w is not None and w != v:
                w = parent[w]
            if w == v:
                continue
            child_count[pv] -= 1
            child_count[u] += 1
            parent[v] = u
            changed = True
            break
        if not changed:
            return _tree_from_parent_array(d, r, parent), True


def _tree_from_parent_array(d: Digraph, r: int, parent: Sequence[int | None]) -> OutTree:
    pmap = {v: p for v, p in enumerate(parent) if p is not None}
    return OutTree(d, r, pmap, validate=False)


def one_optimal_out_branching(d: Digraph, r: int) -> OutTree:
    """An out-branching rooted at r admitting no legal improving 1-change."""
    tree, complete = _leafy_local_search(d, r)
    assert complete
    return tree


def extend_to_out_branching(d: Digraph, tree: OutTree) -> OutTree:
    """Grow an out-tree to a spanning one, keeping all its arcs.

    Missing vertices are attached breadth-first from the existing tree,
    scanning candidate parents in tree BFS order (smallest id first within
    a layer).  Adding a pendant vertex never decreases the leaf count.
    """
    if tree.digraph is not d and tree.digraph != d:
        raise ValueError("tree does not live in the given digraph")
    if len(reachable_set(d, tree.root)) != d.n:
        raise NotExtendable(f"root {tree.root} does not reach all of V")
    if tree.is_spanning():
        return tree
    parent = dict(tree.parent)
    attached = set(tree.vertices)
    queue = deque(tree.bfs_order())
    while queue:
        u = queue.popleft()
        for v in d.out_neighbors(u):
            if v not in attached:
                attached.add(v)
                parent[v] = u
                queue.append(v)
    result = OutTree(d, tree.root, parent, validate=False)
    assert result.is_spanning()
    return result


def apply_path_changes(tree: OutTree, q: Sequence[int]) -> OutTree:
    """Apply the 1-change for every arc of the dipath ``q`` not already in
    the tree, in path order.  ``q`` must start at the root; the result is
    an out-branching containing the whole path.
    """
    d = tree.digraph
    if d is None:
        raise ValueError("tree has no host digraph")
    if not tree.is_spanning():
        raise ValueError("path-batched changes need an out-branching")
    if not q or q[0] != tree.root:
        raise QNotFromRoot("path must start at the tree root")
    if len(set(q)) != len(q):
        raise ValueError("path vertices must be distinct")
    for a, b in zip(q, q[1:]):
        if not d.has_arc(a, b):
            raise ValueError(f"({a},{b}) is not an arc")
    parent = dict(tree.parent)
    for u, v in zip(q, q[1:]):
        if parent.get(v) == u:
            continue
        w: int | None = u  # the change must stay legal at application time
        while w is not None and w != v:
            w = parent.get(w)
        if w == v:
            raise ConstructionError(f"batched change for ({u},{v}) would create a cycle")
        parent[v] = u
    result = OutTree(d, tree.root, parent, validate=False)
    for u, v in zip(q, q[1:]):
        if result.parent.get(v) != u:
            raise ConstructionError("result does not contain the path")
    return result


def witness_text(tree: OutTree) -> str:
    """Serialize: 'root r' then 'parent child' lines in BFS order."""
    lines = [f"root {tree.root}"]
    kids = tree.children_map()
    queue = deque([tree.root])
    while queue:
        u = queue.popleft()
        for c in kids.get(u, ()):
            lines.append(f"{u} {c}")
            queue.append(c)
    return "\n".join(lines) + "\n"


def parse_witness(text: str, digraph: Digraph | None = None) -> OutTree:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("root "):
        raise ValueError("witness must start with a 'root r' line")
    root = int(lines[0].split()[1])
    parent: dict[int, int] = {}
    for ln in lines[1:]:
        p, c = (int(x) for x in ln.split())
        if c in parent:
            raise ValueError(f"vertex {c} has two parents")
        parent[c] = p
    return OutTree(digraph, root, parent)
