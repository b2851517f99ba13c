import random

import pytest

from maxleaf.digraph import Digraph
from maxleaf.errors import (
    ConstructionError,
    NotExtendable,
    QNotFromRoot,
    RootCannotReachAll,
    RootReparent,
    WouldCreateCycle,
)
from maxleaf.oracle import enumerate_out_branchings
from maxleaf.outtree import (
    OutTree,
    apply_path_changes,
    extend_to_out_branching,
    is_improving,
    is_one_optimal,
    one_change,
    one_optimal_out_branching,
    one_optimality_violation,
    parse_witness,
    tree_leq,
    witness_text,
)

from conftest import complete_digraph, cycle_digraph, seeded_random_digraph


def path_tree(d, k):
    return OutTree(d, 0, {i: i - 1 for i in range(1, k)})


def random_tree(n, seed):
    """A random out-tree shape on 0..n-1 rooted at 0, host arcs implied."""
    rng = random.Random(seed)
    parent = {v: rng.randrange(0, v) for v in range(1, n)}
    d = Digraph(n, sorted({(p, v) for v, p in parent.items()}))
    return OutTree(d, 0, parent)


class TestOutTreeBasics:
    def test_invariants_checked(self):
        d = Digraph(3, [(0, 1), (1, 2)])
        OutTree(d, 0, {1: 0, 2: 1})
        with pytest.raises(ValueError):
            OutTree(d, 0, {1: 0, 2: 0})  # (0,2) not an arc
        with pytest.raises(ValueError):
            OutTree(d, 0, {0: 1, 1: 0, 2: 1})  # root has a parent
        with pytest.raises(ValueError):
            OutTree(Digraph(2, [(0, 1), (1, 0)]), 0, {1: 1})  # self-parent cycle

    def test_roles(self):
        d = Digraph(4, [(0, 1), (0, 2), (2, 3)])
        t = OutTree(d, 0, {1: 0, 2: 0, 3: 2})
        assert t.leaves == {1, 3}
        assert t.branch_vertices == {0}
        assert t.branch_successors == {1, 2}

    def test_role_bounds_prop(self):
        for seed in range(300):
            t = random_tree(2 + seed % 11, seed)
            nl = t.leaf_count
            assert nl >= 1
            assert len(t.branch_vertices) <= nl - 1
            assert len(t.branch_successors) <= 2 * nl - 2 or nl == 1

    def test_single_vertex(self):
        t = OutTree(Digraph(1, []), 0, {})
        assert t.leaves == {0} and t.leaf_count == 1
        assert t.branch_vertices == frozenset()


class TestTreeOrder:
    def test_path_order(self):
        d = Digraph(3, [(0, 1), (1, 2)])
        t = path_tree(d, 3)
        assert tree_leq(t, 0, 2)
        assert tree_leq(t, 1, 1)
        assert not tree_leq(t, 2, 0)

    def test_non_member_rejected(self):
        d = Digraph(3, [(0, 1)])
        t = OutTree(d, 0, {1: 0})
        with pytest.raises(ValueError):
            tree_leq(t, 0, 2)

    def test_partial_order_properties(self):
        for seed in range(40):
            t = random_tree(12, seed)
            vs = sorted(t.vertices)
            rng = random.Random(seed)
            for _ in range(150):
                u, v, w = rng.choice(vs), rng.choice(vs), rng.choice(vs)
                assert tree_leq(t, u, u)
                if tree_leq(t, u, v) and tree_leq(t, v, u):
                    assert u == v
                if tree_leq(t, u, v) and tree_leq(t, v, w):
                    assert tree_leq(t, u, w)


class TestOneChange:
    def test_improving_change(self):
        d = Digraph(3, [(0, 1), (1, 2), (0, 2)])
        t = path_tree(d, 3)
        t2 = one_change(t, (0, 2))
        assert sorted(t2.arcs()) == [(0, 1), (0, 2)]
        assert t2.leaf_count == 2

    def test_legal_but_leaf_reducing(self):
        d = Digraph(3, [(0, 1), (1, 2), (0, 2)])
        t = OutTree(d, 0, {1: 0, 2: 0})
        t2 = one_change(t, (1, 2))
        assert sorted(t2.arcs()) == [(0, 1), (1, 2)]
        assert t2.leaf_count < t.leaf_count

    def test_cycle_refused(self):
        d = Digraph(3, [(0, 1), (1, 2), (2, 1)])
        t = path_tree(d, 3)
        with pytest.raises(WouldCreateCycle):
            one_change(t, (2, 1))

    def test_root_refused(self):
        d = Digraph(2, [(0, 1), (1, 0)])
        t = OutTree(d, 0, {1: 0})
        with pytest.raises(RootReparent):
            one_change(t, (1, 0))

    def test_succeeds_iff_not_leq(self):
        for seed in range(60):
            d = seeded_random_digraph(6, 0.4, seed)
            trees = enumerate_out_branchings(d)
            if not trees:
                continue
            t = trees[0]
            for arc in d.arcs:
                u, v = arc
                if v == t.root or t.has_tree_arc(u, v):
                    continue
                if tree_leq(t, v, u):
                    with pytest.raises(WouldCreateCycle):
                        one_change(t, arc)
                else:
                    t2 = one_change(t, arc)
                    OutTree(d, t2.root, t2.parent)  # re-validates
                    assert t2.is_spanning()

    def test_improving_matches_leaf_delta(self):
        checked = 0
        for seed in range(80):
            d = seeded_random_digraph(6, 0.4, seed + 50)
            trees = enumerate_out_branchings(d)
            if not trees:
                continue
            t = trees[min(seed, len(trees) - 1)]
            for arc in d.arcs:
                u, v = arc
                if v == t.root or t.has_tree_arc(u, v) or tree_leq(t, v, u):
                    continue
                t2 = one_change(t, arc)
                assert (t2.leaf_count > t.leaf_count) == is_improving(t, arc)
                checked += 1
        assert checked > 200

    def test_improving_examples(self):
        d = Digraph(3, [(0, 1), (1, 2), (0, 2)])
        assert is_improving(path_tree(d, 3), (0, 2))
        d2 = Digraph(3, [(0, 1), (0, 2), (1, 2)])
        star = OutTree(d2, 0, {1: 0, 2: 0})
        assert not is_improving(star, (1, 2))  # tail is a leaf
        d3 = Digraph(4, [(0, 1), (0, 2), (2, 3), (1, 2)])
        t3 = OutTree(d3, 0, {1: 0, 2: 0, 3: 2})
        assert not is_improving(t3, (1, 2))  # head is a branch successor


class TestOneOptimal:
    def test_star_example(self):
        d = Digraph(3, [(0, 1), (1, 2), (0, 2)])
        t = one_optimal_out_branching(d, 0)
        assert sorted(t.arcs()) == [(0, 1), (0, 2)]
        assert t.leaf_count == 2

    def test_cycle(self):
        t = one_optimal_out_branching(cycle_digraph(3), 0)
        assert sorted(t.arcs()) == [(0, 1), (1, 2)]

    def test_unreachable_root(self):
        with pytest.raises(RootCannotReachAll):
            one_optimal_out_branching(Digraph(3, [(0, 1)]), 0)

    def test_output_is_one_optimal(self):
        for seed in range(80):
            d = seeded_random_digraph(6, 0.4, seed)
            from maxleaf.digraph import reachable_set

            if len(reachable_set(d, 0)) != d.n:
                continue
            t = one_optimal_out_branching(d, 0)
            assert t.root == 0 and t.is_spanning()
            assert one_optimality_violation(d, t) is None


class TestExtend:
    def test_single_attachment(self):
        d = Digraph(3, [(1, 2), (1, 0)])
        t = OutTree(d, 1, {2: 1})
        ext = extend_to_out_branching(d, t)
        assert sorted(ext.arcs()) == [(1, 0), (1, 2)]

    def test_already_spanning(self):
        d = cycle_digraph(3)
        t = OutTree(d, 0, {1: 0, 2: 1})
        assert extend_to_out_branching(d, t) is t

    def test_chord_preserved(self):
        d = Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
        t = OutTree(d, 0, {2: 0})
        ext = extend_to_out_branching(d, t)
        assert ext.is_spanning() and ext.has_tree_arc(0, 2)
        OutTree(d, ext.root, ext.parent)

    def test_not_extendable(self):
        d = Digraph(3, [(0, 1)])
        t = OutTree(d, 0, {1: 0})
        with pytest.raises(NotExtendable):
            extend_to_out_branching(d, t)

    def test_leaf_count_never_drops(self):
        for seed in range(60):
            d = seeded_random_digraph(7, 0.35, seed)
            from maxleaf.digraph import reachable_set

            roots = [r for r in range(d.n) if len(reachable_set(d, r)) == d.n]
            if not roots:
                continue
            r = roots[0]
            sub_vertices = sorted(reachable_set(d, r, skip=-1))[:4]
            # grow a small out-tree inside the reachable region
            t = OutTree(d, r, {})
            for v in sorted(d.out_neighbors(r))[:2]:
                t = OutTree(d, r, {**t.parent, v: r}, validate=False)
            before = t.leaf_count
            ext = extend_to_out_branching(d, t)
            assert ext.leaf_count >= before


class TestApplyPathChanges:
    def test_noop_when_path_inside_tree(self):
        d = Digraph(3, [(0, 1), (1, 2)])
        t = path_tree(d, 3)
        t2 = apply_path_changes(t, [0, 1, 2])
        assert t2.parent == t.parent

    def test_frozen_example(self):
        d = Digraph(3, [(0, 1), (1, 2), (0, 2), (2, 1)])
        t = OutTree(d, 0, {2: 0, 1: 2})
        t2 = apply_path_changes(t, [0, 1, 2])
        assert sorted(t2.arcs()) == [(0, 1), (1, 2)]

    def test_not_from_root(self):
        d = Digraph(3, [(0, 1), (1, 2)])
        with pytest.raises(QNotFromRoot):
            apply_path_changes(path_tree(d, 3), [1, 2])

    def test_random_paths_give_valid_branchings(self):
        checked = 0
        for seed in range(150):
            d = seeded_random_digraph(7, 0.35, seed)
            trees = enumerate_out_branchings(d) if d.n <= 8 else []
            if not trees:
                continue
            t = trees[0]
            rng = random.Random(seed)
            q = [t.root]
            while True:
                nxt = [w for w in d.out_neighbors(q[-1]) if w not in q]
                if not nxt or rng.random() < 0.3:
                    break
                q.append(rng.choice(nxt))
            if len(q) < 2:
                continue
            t2 = apply_path_changes(t, q)
            OutTree(d, t2.root, t2.parent)
            assert t2.is_spanning()
            for u, v in zip(q, q[1:]):
                assert t2.has_tree_arc(u, v)
            checked += 1
        assert checked > 50


class TestWitnessFormat:
    def test_round_trip(self):
        d = Digraph(4, [(0, 2), (0, 1), (2, 3)])
        t = OutTree(d, 0, {1: 0, 2: 0, 3: 2})
        text = witness_text(t)
        assert text.splitlines()[0] == "root 0"
        back = parse_witness(text, d)
        assert back.parent == t.parent and back.root == 0

    def test_bfs_order(self):
        d = Digraph(4, [(0, 2), (0, 1), (2, 3)])
        t = OutTree(d, 0, {1: 0, 2: 0, 3: 2})
        assert witness_text(t) == "root 0\n0 1\n0 2\n2 3\n"
