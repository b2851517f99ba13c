import itertools
import random

import pytest

from maxleaf.digraph import Digraph, find_useless_arcs
from maxleaf.outtree import OutTree


def cycle_digraph(n: int) -> Digraph:
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_digraph(n: int) -> Digraph:
    return Digraph(n, [(i, i + 1) for i in range(n - 1)])


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def star_digraph(k: int) -> Digraph:
    """Center 0 with k out-arcs."""
    return Digraph(k + 1, [(0, i) for i in range(1, k + 1)])


def all_digraphs(n: int):
    """Every digraph on n vertices (all subsets of the n(n-1) possible arcs)."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for r in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, r):
            yield Digraph(n, list(combo))


def seeded_random_digraph(n: int, p: float, seed: int) -> Digraph:
    rng = random.Random(seed)
    arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return Digraph(n, arcs)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def lemma2_instance(p: int, seed: int, root_on_path: bool = False):
    """A digraph + out-branching + path satisfying the path procedure's
    hypotheses: back arcs or feeder arcs give every path vertex an extra
    in-neighbor, no forward jumps, no branch vertices on the path."""
    rng = random.Random(seed)
    feeders = max(3, p // 4)
    if root_on_path:
        path = list(range(p))
        fs = [p + i for i in range(feeders)]
        arcs = {(i, i + 1) for i in range(p - 1)}
        arcs.add((p - 1, fs[0]))  # keeps the path end non-leaf
        arcs.update((fs[i], fs[i + 1]) for i in range(feeders - 1))
        parent = {i + 1: i for i in range(p - 1)}
        parent[fs[0]] = p - 1
        for i in range(feeders - 1):
            parent[fs[i + 1]] = fs[i]
        root = 0
    else:
        root = 0
        path = [1 + i for i in range(p)]
        fs = [p + 1 + i for i in range(feeders)]
        arcs = {(0, 1)}
        arcs.update((path[i], path[i + 1]) for i in range(p - 1))
        arcs.update((0, f) for f in fs)
        parent = {path[0]: 0}
        parent.update({path[i + 1]: path[i] for i in range(p - 1)})
        parent.update({f: 0 for f in fs})
    n = (p + feeders) if root_on_path else (1 + p + feeders)
    for i, v in enumerate(path):
        # give v an in-neighbor besides its path neighbors
        if i <= p - 3 and rng.random() < 0.5:
            j = rng.randrange(i + 2, p)
            arcs.add((path[j], v))
        else:
            arcs.add((rng.choice(fs), v))
    for _ in range(p // 2):  # extra back arcs at random
        i = rng.randrange(0, p - 2)
        j = rng.randrange(i + 2, p)
        arcs.add((path[j], path[i]))
    d = Digraph(n, sorted(arcs))
    tree = OutTree(d, root, parent)
    return d, tree, path


def merged_blob(n: int, seed: int) -> Digraph:
    """Two strongly connected min-in-degree-3 blobs bridged one way: not
    strongly connected, still free of useless arcs (verified)."""
    from maxleaf.generators import GeneratorSpec, generate

    half = n // 2
    for attempt in range(20):
        a = generate(GeneratorSpec("scc-indeg3", half, seed=seed + attempt))
        b = generate(GeneratorSpec("scc-indeg3", n - half, seed=seed + attempt + 1000))
        arcs = list(a.arcs)
        arcs += [(u + half, v + half) for u, v in b.arcs]
        arcs += [(i, half + i) for i in range(3)]
        d = Digraph(n, arcs)
        if not find_useless_arcs(d) and min(d.in_degree(v) for v in range(n)) >= 3:
            return d
    raise AssertionError("could not build a useless-arc-free blob")
