"""Nice-form tree decompositions and exact max-leaf dynamic programming.

The DP state per bag records, for every bag vertex: membership in the
partial solution, whether its parent arc is committed, whether it has a
committed child, plus the partition of present bag vertices into
connected components of the partial out-forest.  A component none of
whose bag members lacks a parent has its root already forgotten; at most
one such component can ever survive, and a component that loses its last
bag vertex closes the solution ("done").  A vertex's leaf credit is
decided when it is forgotten, the only point its out-degree is final.

Arcs are committed while introducing an endpoint, one arc at a time with
state deduplication, so the four node kinds (leaf / introduce / forget /
join) suffice.

Table sizes stay manageable through three devices: bags that are subsets
of a neighbor are contracted away before nicification, per-vertex flags
are packed into an integer (3 bits per bag position) with the partition
as a normalized block-id tuple over positions, and states agreeing on
everything but the has-child flags are kept as a Pareto front (childless
sets only ever add forget-time credit, so a superset at no lower value
dominates).  Evicted entries stay reachable through back pointers, so
witnesses survive pruning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .digraph import Digraph
from .errors import InvalidDecomposition, NoOutBranching
from .outtree import OutTree


@dataclass(frozen=True)
class NiceNode:
    kind: str  # "leaf" | "introduce" | "forget" | "join"
    vertex: int | None
    bag: tuple[int, ...]
    children: tuple[int, ...]


@dataclass
class NiceDecomposition:
    nodes: list[NiceNode]
    root: int

    @property
    def width(self) -> int:
        return max(len(nd.bag) for nd in self.nodes) - 1

    def covered_vertices(self) -> set[int]:
        out: set[int] = set()
        for nd in self.nodes:
            out.update(nd.bag)
        return out


def _contracted_skeleton(td) -> tuple[int, dict[int, list[int]], dict[int, tuple[int, ...]]]:
    """Fold every node whose bag is a subset of its parent's into the parent.

    Classic simplification: coverage and occurrence-connectivity survive,
    width never grows, and decompositions with many equal bags collapse to
    a few nodes (often eliminating joins entirely).
    Returns (root, children lists, bags) of the contracted tree.
    """
    skeleton = td.skeleton
    bags = {s: frozenset(td.bags[s]) for s in td.bags}
    children = {s: list(skeleton.children(s)) for s in bags}
    order: list[int] = []
    stack = [skeleton.root]
    while stack:
        s = stack.pop()
        order.append(s)
        stack.extend(children[s])
    removed: set[int] = set()
    for s in reversed(order):  # children first
        if s in removed:
            continue
        kept: list[int] = []
        pending = children[s]
        while pending:
            c = pending.pop()
            if bags[c] <= bags[s]:
                removed.add(c)
                pending.extend(children[c])
            else:
                kept.append(c)
        children[s] = sorted(kept)
    root = skeleton.root
    return root, {s: children[s] for s in bags if s not in removed}, {
        s: tuple(sorted(bags[s])) for s in bags if s not in removed
    }


def to_nice_decomposition(td) -> NiceDecomposition:
    """Binary nice form of a tree decomposition: same width, same coverage.

    Subset bags are contracted first; each remaining skeleton edge becomes
    a forget chain then an introduce chain, multiple children fold into a
    spine of joins, and the top forgets the root bag down to an empty
    final node.
    """
    if td.skeleton is None or set(td.bags) != set(td.skeleton.vertices):
        raise InvalidDecomposition("bags and skeleton nodes disagree")
    root_s, children, bags = _contracted_skeleton(td)
    nodes: list[NiceNode] = []

    def add(kind: str, vertex: int | None, bag, kids) -> int:
        nodes.append(NiceNode(kind, vertex, tuple(bag), tuple(kids)))
        return len(nodes) - 1

    order: list[int] = []
    stack: list[tuple[int, bool]] = [(root_s, False)]
    while stack:
        s, processed = stack.pop()
        if processed:
            order.append(s)
            continue
        stack.append((s, True))
        for c in children[s]:
            stack.append((c, False))

    top_of: dict[int, int] = {}
    for s in order:
        bag_s = set(bags[s])
        kids = children[s]
        if not kids:
            cur = add("leaf", None, (), ())
            grown: set[int] = set()
            for x in sorted(bag_s):
                grown.add(x)
                cur = add("introduce", x, sorted(grown), (cur,))
        else:
            tops = []
            for c in kids:
                t = top_of[c]
                cur_bag = set(bags[c])
                for x in sorted(cur_bag - bag_s):
                    cur_bag.discard(x)
                    t = add("forget", x, sorted(cur_bag), (t,))
                for x in sorted(bag_s - cur_bag):
                    cur_bag.add(x)
                    t = add("introduce", x, sorted(cur_bag), (t,))
                tops.append(t)
            cur = tops[0]
            for other in tops[1:]:
                cur = add("join", None, sorted(bag_s), (cur, other))
        top_of[s] = cur

    cur = top_of[root_s]
    remaining = set(bags[root_s])
    for x in sorted(remaining):
        remaining = remaining - {x}
        cur = add("forget", x, sorted(remaining), (cur,))
    return NiceDecomposition(nodes, cur)


def _insert_slot(bits: int, pos: int) -> int:
    low = (1 << (3 * pos)) - 1
    return (bits & low) | ((bits & ~low) << 3)


def _drop_slot(bits: int, pos: int) -> int:
    low = (1 << (3 * pos)) - 1
    return (bits & low) | ((bits >> 3) & ~low)


def _normalize(part) -> tuple[int, ...]:
    relabel = [-1] * 32  # block ids stay below bag size + 8
    nxt = 0
    out = []
    for v in part:
        if v < 0:
            out.append(-1)
        else:
            r = relabel[v]
            if r < 0:
                relabel[v] = r = nxt
                nxt += 1
            out.append(r)
    return tuple(out)


def _forgotten_roots(pp: int, part) -> int:
    """Number of blocks in which every member already has a parent."""
    rooted = 0  # bitmask of block ids seen with a parentless member
    seen = 0
    shift = 1
    for b in part:
        if b >= 0:
            bit = 1 << b
            seen |= bit
            if not pp >> shift & 1:
                rooted |= bit
        shift += 3
    return (seen & ~rooted).bit_count()


def _put(table: dict, coarse, cm: int, value: int, back) -> None:
    """Insert into the Pareto bucket for ``coarse``: entries are
    (childless-mask, value, back), and a superset mask at no lower value
    dominates."""
    bucket = table.get(coarse)
    if bucket is None:
        table[coarse] = [(cm, value, back)]
        return
    for ocm, oval, _ in bucket:
        if ocm & cm == cm and oval >= value:
            return
    bucket[:] = [e for e in bucket if not (e[0] & cm == e[0] and e[1] <= value)]
    bucket.append((cm, value, back))


def _run_dp(d: Digraph, nd: NiceDecomposition, spanning: bool):
    """Returns (value, present_vertices, arcs) of an optimal solution, or None.

    Table layout: coarse key (packed presence+parent bits, positional
    block-id partition, done flag) -> Pareto bucket of (childless mask,
    value, back pointer).
    """
    tables: list[dict] = [None] * len(nd.nodes)  # type: ignore[list-item]
    norm_memo: dict[tuple, tuple] = {}

    def normalized(t: tuple) -> tuple:
        got = norm_memo.get(t)
        if got is None:
            got = norm_memo[t] = _normalize(t)
        return got

    for idx, node in enumerate(nd.nodes):
        bag = node.bag
        pos = {v: i for i, v in enumerate(bag)}
        pres_mask = sum(1 << (3 * i) for i in range(len(bag)))
        table: dict = {}
        if node.kind == "leaf":
            _put(table, (0, (), False), 0, 0, ("leaf",))
        elif node.kind == "introduce":
            x = node.vertex
            child_idx = node.children[0]
            child = tables[child_idx]
            child_bag = nd.nodes[child_idx].bag
            px = pos[x]
            bit_x = 1 << (3 * px)
            low = bit_x - 1
            arcs_avail = sorted(
                [(u, x) for u in child_bag if d.has_arc(u, x)]
                + [(x, u) for u in child_bag if d.has_arc(x, u)]
            )
            arc_pos = [(pos[u], pos[v], u, v) for u, v in arcs_avail]
            merge_memo: dict[tuple, tuple | None] = {}
            for (c_pp, c_part, done), bucket in child.items():
                pp0 = (c_pp & low) | ((c_pp & ~low) << 3)
                part0 = c_part[:px] + (-1,) + c_part[px:]
                if done:
                    if not spanning:
                        coarse = (pp0, part0, True)
                        for entry in bucket:
                            cm0 = entry[0]
                            _put(table, coarse, (cm0 & low) | ((cm0 & ~low) << 3), entry[1], ("intro", entry, None, ()))
                    continue
                if not spanning:
                    coarse = (pp0, part0, False)
                    for entry in bucket:
                        cm0 = entry[0]
                        _put(table, coarse, (cm0 & low) | ((cm0 & ~low) << 3), entry[1], ("intro", entry, None, ()))
                pp1 = pp0 | bit_x
                part1 = normalized(c_part[:px] + (31,) + c_part[px:])
                # commit choices depend only on the coarse state: run the
                # chain once, then replay it over each Pareto entry
                chain = {(pp1, part1, 0): ()}
                for pu, pv, u, v in arc_pos:
                    bit_pu, bit_pv = 1 << (3 * pu), 1 << (3 * pv)
                    bit_pv2 = bit_pv << 1
                    additions = {}
                    for (pp, part, tails), arcs in chain.items():
                        if not pp & bit_pu or not pp & bit_pv or pp & bit_pv2:
                            continue
                        ba, bb = part[pu], part[pv]
                        if ba == bb:  # same component: a cycle
                            continue
                        mkey = (part, ba, bb)
                        merged = merge_memo.get(mkey)
                        if merged is None:
                            merged = merge_memo[mkey] = normalized(
                                tuple(ba if t == bb else t for t in part)
                            )
                        key = (pp | bit_pv2, merged, tails | bit_pu)
                        if key not in chain and key not in additions:
                            additions[key] = arcs + ((u, v),)
                    chain.update(additions)
                for (pp, part, tails), arcs in chain.items():
                    coarse = (pp, part, False)
                    for entry in bucket:
                        cm0 = entry[0]
                        cm = (((cm0 & low) | ((cm0 & ~low) << 3)) | bit_x) & ~tails
                        _put(table, coarse, cm, entry[1], ("intro", entry, x, arcs))
        elif node.kind == "forget":
            x = node.vertex
            child_idx = node.children[0]
            child = tables[child_idx]
            child_bag = nd.nodes[child_idx].bag
            px = child_bag.index(x)
            bit_x = 1 << (3 * px)
            low = bit_x - 1
            nlow = ~low
            for (c_pp, c_part, done), bucket in child.items():
                pp = (c_pp & low) | ((c_pp >> 3) & nlow)
                part = normalized(c_part[:px] + c_part[px + 1 :])
                if done or not c_pp & bit_x:
                    coarse = (pp, part, done)
                    for entry in bucket:
                        cm0 = entry[0]
                        _put(table, coarse, (cm0 & low) | ((cm0 >> 3) & nlow), entry[1], ("forget", entry))
                    continue
                if c_part.count(c_part[px]) == 1:  # closing its component
                    if pp & pres_mask:
                        continue  # a closed component next to open ones is dead
                    coarse = (pp, part, True)
                    for entry in bucket:
                        gain = 1 if entry[0] & bit_x else 0
                        _put(table, coarse, 0, entry[1] + gain, ("forget", entry))
                    continue
                if _forgotten_roots(pp, part) >= 2:
                    continue  # two rootless components can never merge
                coarse = (pp, part, False)
                for entry in bucket:
                    cm0 = entry[0]
                    gain = 1 if cm0 & bit_x else 0
                    _put(table, coarse, (cm0 & low) | ((cm0 >> 3) & nlow), entry[1] + gain, ("forget", entry))
        else:  # join
            left = tables[node.children[0]]
            right = tables[node.children[1]]
            parent_mask = pres_mask << 1
            by_presence: dict[int, list] = {}
            for rkey, rbucket in right.items():
                if rkey[2]:
                    continue
                by_presence.setdefault(rkey[0] & pres_mask, []).append((rkey, rbucket))
            nbag = len(bag)
            empty_part = (-1,) * nbag
            empty_key = (0, empty_part, False)
            for (l_pp, l_part, l_done), lbucket in left.items():
                if l_done:
                    rbucket = right.get(empty_key)
                    if rbucket is not None:
                        for le in lbucket:
                            for re in rbucket:
                                _put(table, (l_pp, l_part, True), 0, le[1] + re[1], ("join", le, re))
                    continue
                if l_pp == 0:
                    for rkey, rbucket in right.items():
                        if rkey[2]:
                            for le in lbucket:
                                for re in rbucket:
                                    _put(table, rkey, 0, le[1] + re[1], ("join", le, re))
                for rkey, rbucket in by_presence.get(l_pp & pres_mask, ()):
                    r_pp, r_part, _ = rkey
                    if l_pp & r_pp & parent_mask:
                        continue  # some vertex would get two parents
                    pp = l_pp | r_pp
                    # union-find over block ids; every present position links
                    # its left and right blocks, and a repeated link is a cycle
                    uf = list(range(2 * nbag))
                    cyclic = False
                    for i in range(nbag):
                        b = l_part[i]
                        if b < 0:
                            continue
                        a, c = b, nbag + r_part[i]
                        while uf[a] != a:
                            a = uf[a]
                        while uf[c] != c:
                            c = uf[c]
                        if a == c:
                            cyclic = True
                            break
                        uf[c] = a
                    if cyclic:
                        continue
                    merged = []
                    for i in range(nbag):
                        b = l_part[i]
                        if b < 0:
                            merged.append(-1)
                            continue
                        a = b
                        while uf[a] != a:
                            a = uf[a]
                        merged.append(a)
                    part = normalized(tuple(merged))
                    if _forgotten_roots(pp, part) >= 2:
                        continue
                    coarse = (pp, part, False)
                    for le in lbucket:
                        for re in rbucket:
                            _put(table, coarse, le[0] & re[0], le[1] + re[1], ("join", le, re))
        tables[idx] = table

    final_bucket = tables[nd.root].get((0, (), True))
    if final_bucket is None:
        return None
    best = max(final_bucket, key=lambda e: e[1])
    value = best[1]
    present: set[int] = set()
    arcs: list[tuple[int, int]] = []
    stack = [(nd.root, best)]
    while stack:
        node_idx, entry = stack.pop()
        tag = entry[2]
        node = nd.nodes[node_idx]
        if tag[0] == "leaf":
            continue
        if tag[0] == "intro":
            _, child_entry, added, committed = tag
            if added is not None:
                present.add(added)
                arcs.extend(committed)
            stack.append((node.children[0], child_entry))
        elif tag[0] == "forget":
            stack.append((node.children[0], tag[1]))
        else:
            stack.append((node.children[0], tag[1]))
            stack.append((node.children[1], tag[2]))
    return value, present, arcs


def _witness_tree(d: Digraph, present: set[int], arcs: list[tuple[int, int]]) -> OutTree:
    parent = {v: u for u, v in arcs}
    roots = [v for v in present if v not in parent]
    assert len(roots) == 1, "witness must be a single out-tree"
    return OutTree(d, roots[0], parent)


def max_leaf_out_tree_dp(d: Digraph, nd: NiceDecomposition) -> tuple[int, OutTree]:
    """Exact maximum leaf count over all non-empty out-trees, with witness."""
    if nd.covered_vertices() != set(range(d.n)):
        raise InvalidDecomposition("decomposition does not cover the digraph")
    result = _run_dp(d, nd, spanning=False)
    assert result is not None, "a single vertex is always an out-tree"
    value, present, arcs = result
    tree = _witness_tree(d, present, arcs)
    assert tree.leaf_count == value
    return value, tree


def max_leaf_out_branching_dp(d: Digraph, nd: NiceDecomposition) -> tuple[int, OutTree]:
    """Exact maximum leaf count over out-branchings, with spanning witness."""
    if nd.covered_vertices() != set(range(d.n)):
        raise InvalidDecomposition("decomposition does not cover the digraph")
    result = _run_dp(d, nd, spanning=True)
    if result is None:
        raise NoOutBranching("no spanning out-tree exists")
    value, present, arcs = result
    tree = _witness_tree(d, present, arcs)
    assert tree.is_spanning() and tree.leaf_count == value
    return value, tree
