import pytest

from maxleaf.digraph import (
    Digraph,
    find_useless_arcs,
    has_out_branching,
    parse_digraph,
    reachable_set,
    remove_useless_arcs,
    serialize_digraph,
    strong_components,
)
from maxleaf.errors import (
    DuplicateArc,
    MalformedHeader,
    NoOutBranching,
    SelfLoop,
    VertexOutOfRange,
)
from maxleaf.oracle import enumerate_out_branchings

from conftest import all_digraphs, cycle_digraph, path_digraph, seeded_random_digraph


class TestParsing:
    def test_basic(self):
        d = parse_digraph("3 2\n0 1\n1 2\n")
        assert d.n == 3 and d.arcs == ((0, 1), (1, 2))

    def test_empty_arcs(self):
        d = parse_digraph("1 0\n")
        assert d.n == 1 and d.arcs == ()

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoop):
            parse_digraph("2 1\n0 0\n")

    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateArc):
            parse_digraph("2 2\n0 1\n0 1\n")

    def test_vertex_out_of_range(self):
        with pytest.raises(VertexOutOfRange):
            parse_digraph("2 1\n0 2\n")

    def test_malformed_header(self):
        with pytest.raises(MalformedHeader):
            parse_digraph("nonsense\n")
        with pytest.raises(MalformedHeader):
            parse_digraph("3\n")
        with pytest.raises(MalformedHeader):
            parse_digraph("3 2\n0 1\n")  # missing an arc line

    def test_comments_and_bytes(self):
        d = parse_digraph(b"# a comment\n3 1\n# another\n0 2\n")
        assert d.arcs == ((0, 2),)

    def test_round_trip(self):
        d = seeded_random_digraph(7, 0.4, 11)
        assert parse_digraph(serialize_digraph(d)) == d

    def test_serialized_shape(self):
        d = Digraph(3, [(0, 1), (1, 2)])
        assert serialize_digraph(d) == "3 2\n0 1\n1 2\n"


class TestReachability:
    def test_path(self):
        d = path_digraph(3)
        assert reachable_set(d, 0) == {0, 1, 2}
        assert reachable_set(d, 2) == {2}

    def test_includes_self_and_partial(self):
        d = Digraph(3, [(0, 1), (1, 2), (2, 1)])
        assert reachable_set(d, 1) == {1, 2}

    def test_transitive(self, rng):
        for seed in range(25):
            d = seeded_random_digraph(8, 0.3, seed)
            for u in range(d.n):
                ru = reachable_set(d, u)
                assert u in ru
                for v in ru:
                    assert reachable_set(d, v) <= ru


class TestStrongComponents:
    def test_cycle_is_one_component(self):
        scc = strong_components(cycle_digraph(3))
        assert len(scc.components) == 1 and scc.initial_flags == [True]

    def test_path_components(self):
        scc = strong_components(path_digraph(3))
        assert sorted(map(tuple, scc.components)) == [(0,), (1,), (2,)]
        initial = scc.initial_components()
        assert initial == [[0]]

    def test_two_cycle_plus_tail(self):
        d = Digraph(3, [(0, 1), (1, 0), (1, 2)])
        scc = strong_components(d)
        comps = sorted(map(tuple, scc.components))
        assert comps == [(0, 1), (2,)]
        assert scc.initial_components() == [[0, 1]]

    def test_initial_components_have_no_incoming(self, rng):
        for seed in range(30):
            d = seeded_random_digraph(9, 0.25, seed)
            scc = strong_components(d)
            for u, v in d.arcs:
                cu, cv = scc.component_of[u], scc.component_of[v]
                if cu != cv:
                    assert not scc.initial_flags[cv]

    def test_partition(self, rng):
        for seed in range(20):
            d = seeded_random_digraph(8, 0.3, seed + 100)
            scc = strong_components(d)
            seen = sorted(v for comp in scc.components for v in comp)
            assert seen == list(range(d.n))


class TestUselessArcs:
    def test_frozen_example(self):
        d = Digraph(3, [(0, 1), (1, 2), (2, 1)])
        assert {d.arcs[i] for i in find_useless_arcs(d)} == {(2, 1)}
        assert remove_useless_arcs(d).arcs == ((0, 1), (1, 2))

    def test_frozen_example_none_useless(self):
        d = Digraph(3, [(0, 1), (0, 2), (1, 2), (2, 1)])
        assert find_useless_arcs(d) == set()

    def test_cycle_unchanged(self):
        d = cycle_digraph(3)
        assert find_useless_arcs(d) == set()
        assert remove_useless_arcs(d) == d

    def test_no_out_branching_errors(self):
        with pytest.raises(NoOutBranching):
            find_useless_arcs(Digraph(3, [(0, 1)]))
        with pytest.raises(NoOutBranching):
            remove_useless_arcs(Digraph(3, [(0, 1)]))

    def _useless_by_enumeration(self, d):
        used = set()
        for t in enumerate_out_branchings(d):
            used.update(t.arcs())
        return {i for i, a in enumerate(d.arcs) if a not in used}

    def test_matches_enumeration_exhaustive_n3(self):
        for d in all_digraphs(3):
            if not has_out_branching(d):
                continue
            assert find_useless_arcs(d) == self._useless_by_enumeration(d)

    def test_matches_enumeration_seeded(self):
        checked = 0
        for seed in range(400):
            n = 4 + seed % 3
            d = seeded_random_digraph(n, 0.35, seed)
            if not has_out_branching(d):
                continue
            assert find_useless_arcs(d) == self._useless_by_enumeration(d)
            checked += 1
        assert checked > 150

    def test_idempotent_and_preserves_branchings(self):
        corpus = [d for d in all_digraphs(3)]
        corpus += [seeded_random_digraph(4, 0.4, s) for s in range(120)]
        corpus += [seeded_random_digraph(5, 0.3, s) for s in range(120)]
        checked = 0
        for d in corpus:
            if not has_out_branching(d):
                continue
            reduced = remove_useless_arcs(d)
            assert remove_useless_arcs(reduced) == reduced
            before = {frozenset(t.arcs()) for t in enumerate_out_branchings(d)}
            after = {frozenset(t.arcs()) for t in enumerate_out_branchings(reduced)}
            assert before == after
            checked += 1
        assert checked > 100

    def test_surviving_arcs_in_some_branching(self):
        for seed in range(60):
            d = seeded_random_digraph(6, 0.3, seed + 999)
            if not has_out_branching(d):
                continue
            reduced = remove_useless_arcs(d)
            used = set()
            for t in enumerate_out_branchings(reduced):
                used.update(t.arcs())
            assert used == set(reduced.arcs)


class TestDigraphStructure:
    def test_induced(self):
        d = Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        sub, ids = d.induced([1, 2, 3])
        assert ids == [1, 2, 3]
        assert sub.arcs == ((0, 1), (1, 2))

    def test_oriented_predicate(self):
        assert cycle_digraph(4).is_oriented()
        assert not Digraph(2, [(0, 1), (1, 0)]).is_oriented()
