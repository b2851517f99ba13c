"""Directed-graph representation, edge-list I/O, reachability, strong
components and useless-arc preprocessing.

Vertices are dense integers 0..n-1.  A Digraph is immutable after
construction and safe to share.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .errors import (
    DuplicateArc,
    MalformedHeader,
    NoOutBranching,
    ParseError,
    SelfLoop,
    VertexOutOfRange,
)

Arc = tuple[int, int]


class Digraph:
    """A digraph with n vertices and an ordered arc list.

    No self-loops, no duplicate arcs.  Arc indices are stable: they refer
    to positions in ``arcs`` and survive into witness reports.
    """

    __slots__ = ("n", "arcs", "out_adj", "in_adj", "_arc_set", "_out_nbrs", "_in_nbrs")

    def __init__(self, n: int, arcs: Sequence[Arc]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        self.arcs: tuple[Arc, ...] = tuple((int(u), int(v)) for u, v in arcs)
        seen: set[Arc] = set()
        out_adj: list[list[int]] = [[] for _ in range(n)]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        for idx, (u, v) in enumerate(self.arcs):
            if not (0 <= u < n and 0 <= v < n):
                raise VertexOutOfRange(f"arc ({u},{v}) outside 0..{n - 1}")
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise DuplicateArc(f"duplicate arc ({u},{v})")
            seen.add((u, v))
            out_adj[u].append(idx)
            in_adj[v].append(idx)
        self.out_adj = [tuple(lst) for lst in out_adj]
        self.in_adj = [tuple(lst) for lst in in_adj]
        self._arc_set = seen
        self._out_nbrs = [tuple(sorted(self.arcs[i][1] for i in out_adj[u])) for u in range(n)]
        self._in_nbrs = [tuple(sorted(self.arcs[i][0] for i in in_adj[v])) for v in range(n)]

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arc_set

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        """Heads of arcs leaving u, ascending."""
        return self._out_nbrs[u]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        """Tails of arcs entering v, ascending."""
        return self._in_nbrs[v]

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def out_degree(self, u: int) -> int:
        return len(self.out_adj[u])

    def is_oriented(self) -> bool:
        """True when no arc has its reverse also present."""
        return all((v, u) not in self._arc_set for u, v in self.arcs)

    def cache_key(self) -> tuple:
        return (self.n, self.arcs)

    def with_arcs_removed(self, indices: Iterable[int]) -> "Digraph":
        drop = set(indices)
        return Digraph(self.n, [a for i, a in enumerate(self.arcs) if i not in drop])

    def with_arc_added(self, u: int, v: int) -> "Digraph":
        return Digraph(self.n, list(self.arcs) + [(u, v)])

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", list[int]]:
        """Subgraph on ``vertices``; returns it plus the old-id of each new id."""
        old_ids = sorted(set(vertices))
        new_of = {old: new for new, old in enumerate(old_ids)}
        arcs = [
            (new_of[u], new_of[v])
            for (u, v) in self.arcs
            if u in new_of and v in new_of
        ]
        return Digraph(len(old_ids), arcs), old_ids

    def __eq__(self, other) -> bool:
        return isinstance(other, Digraph) and self.cache_key() == other.cache_key()

    def __hash__(self) -> int:
        return hash(self.cache_key())

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={self.m})"


@dataclass
class StrongComponentPartition:
    """SCCs of a digraph plus which ones no outside arc enters."""

    component_of: list[int]
    components: list[list[int]]
    initial_flags: list[bool]

    def initial_components(self) -> list[list[int]]:
        return [c for c, flag in zip(self.components, self.initial_flags) if flag]


def parse_digraph(data: bytes | str | IO) -> Digraph:
    """Parse the edge-list format.

    Lines starting with '#' are comments.  The first real line is
    "n m", followed by exactly m lines "u v".
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        text = data.decode("ascii")
    else:
        text = data
    lines = [ln for ln in text.split("\n") if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MalformedHeader("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise MalformedHeader(f"expected 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MalformedHeader(f"non-integer header {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise MalformedHeader("negative counts in header")
    body = lines[1:]
    if len(body) != m:
        raise MalformedHeader(f"header promises {m} arcs, found {len(body)} lines")
    arcs: list[Arc] = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"bad arc line {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"non-integer arc line {ln!r}") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"arc ({u},{v}) outside 0..{n - 1}")
        arcs.append((u, v))
    return Digraph(n, arcs)


def serialize_digraph(d: Digraph) -> str:
    """Edge-list text: header then one 'u v' line per arc, LF endings."""
    out = [f"{d.n} {d.m}"]
    out.extend(f"{u} {v}" for u, v in d.arcs)
    return "\n".join(out) + "\n"


def reachable_set(d: Digraph, u: int, skip: int = -1) -> set[int]:
    """Vertices reachable from u (including u), optionally avoiding ``skip``."""
    if not (0 <= u < d.n):
        raise ValueError(f"vertex {u} outside 0..{d.n - 1}")
    if u == skip:
        return set()
    seen = {u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in d.out_neighbors(x):
            if y != skip and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def strong_components(d: Digraph) -> StrongComponentPartition:
    """Tarjan's algorithm, iterative; components in discovery order."""
    n = d.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp_of = [-1] * n
    comps: list[list[int]] = []
    counter = 0
    for start in range(n):
        if index[start] != -1:
            continue
        work: list[tuple[int, int]] = [(start, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            nbrs = d.out_neighbors(v)
            while pi < len(nbrs):
                w = nbrs[pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                p, _ = work[-1]
                low[p] = min(low[p], low[v])
    initial = [True] * len(comps)
    for u, v in d.arcs:
        if comp_of[u] != comp_of[v]:
            initial[comp_of[v]] = False
    return StrongComponentPartition(comp_of, comps, initial)


def _unique_initial_component(d: Digraph) -> list[int]:
    """The single initial SCC, or NoOutBranching if there is not exactly one.

    A digraph has an out-branching iff exactly one SCC receives no outside
    arc; every vertex of that component reaches all of V.
    """
    if d.n == 0:
        raise NoOutBranching("empty digraph")
    scc = strong_components(d)
    roots = scc.initial_components()
    if len(roots) != 1:
        raise NoOutBranching(f"{len(roots)} initial strong components")
    return roots[0]


def has_out_branching(d: Digraph) -> bool:
    try:
        _unique_initial_component(d)
        return True
    except NoOutBranching:
        return False


def find_useless_arcs(d: Digraph) -> set[int]:
    """Indices of arcs contained in no out-branching.

    Fix a root r reaching all of V.  An arc (u,v) whose head does not
    reach all of V is kept iff some dipath from r ends with (u,v), i.e.
    u is reachable from r with v removed.  Arcs whose head reaches all
    of V are never useless.
    """
    comp0 = _unique_initial_component(d)
    r = comp0[0]
    full = set(comp0)  # exactly the vertices with R(v) = V
    useless: set[int] = set()
    for v in range(d.n):
        if v in full or not d.in_adj[v]:
            continue
        ok_tails = reachable_set(d, r, skip=v)
        for idx in d.in_adj[v]:
            u = d.arcs[idx][0]
            if u not in ok_tails:
                useless.add(idx)
    return useless


def remove_useless_arcs(d: Digraph) -> Digraph:
    """Digraph with the same vertices and every useless arc dropped."""
    return d.with_arcs_removed(find_useless_arcs(d))
