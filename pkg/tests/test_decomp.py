import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicore.decomp import (
    ALGORITHMS,
    CoreState,
    compute_cnt,
    decompose_star,
    im_core,
    local_core,
    semi_core,
    semi_core_plus,
    semi_core_star,
    update_nbr_cnt,
    update_range,
)
from semicore.verify import G9_CORES, brute_force_core, cnt_mismatches, adjacency, record_trace

G9_DEGREES = [3, 3, 4, 6, 3, 5, 3, 2, 1]


@pytest.mark.parametrize(
    "c_old, cores, expected",
    [
        (6, [3, 3, 3, 3, 5, 3], 3),
        (0, [], 0),
        (5, [3, 3, 2, 1, 1], 2),
        (3, [], 0),
        (2, [9, 9, 9], 2),
        (4, [0, 0, 0, 0], 0),
    ],
)
def test_local_core(c_old, cores, expected):
    assert local_core(c_old, cores) == expected


@given(st.integers(0, 12), st.lists(st.integers(0, 15), max_size=20))
def test_local_core_matches_definition(c_old, cores):
    want = max((k for k in range(c_old + 1) if sum(c >= k for c in cores) >= k), default=0)
    assert local_core(c_old, cores) == want


def test_compute_cnt():
    assert compute_cnt([3, 3, 2, 2, 1], 3) == 2
    assert compute_cnt([], 1) == 0


def test_update_nbr_cnt_only_touches_range():
    state = CoreState(core=[5, 3, 2, 1], cnt=[0, 3, 2, 1], active=bytearray(4))
    update_nbr_cnt(state, [1, 2, 3], c_old=3, c_new=2)
    assert list(state.cnt) == [0, 2, 2, 1]


class TestUpdateRange:
    def _state(self, v_max):
        s = CoreState(core=[0] * 9, cnt=[0] * 9, active=bytearray(9), v_max=v_max)
        s.begin_pass()
        return s

    def test_forward_neighbor_extends_current_pass(self):
        s = self._state(5)
        update_range(s, 8, 5)
        assert s.v_max == 8
        assert not s.update
        assert (s.next_min, s.next_max) == (8, 0)

    def test_backward_neighbor_is_deferred(self):
        s = self._state(5)
        update_range(s, 3, 5)
        assert s.update
        assert s.next_min <= 3 <= s.next_max

    def test_idempotent_when_covered(self):
        s = self._state(8)
        update_range(s, 6, 5)
        assert s.v_max == 8 and not s.update


class TestG9:
    def test_all_algorithms_agree(self, g9):
        for run in ALGORITHMS.values():
            core, _ = run(g9)
            assert tuple(core) == G9_CORES

    def test_semi_core_trace(self, g9):
        (core, report), table = record_trace(semi_core, g9)
        assert (report.iterations, report.node_computations) == (4, 36)
        assert table.rows[0] == G9_DEGREES
        assert table.rows[1:] == [
            [3, 3, 3, 3, 3, 3, 2, 2, 1],
            [3, 3, 3, 3, 3, 2, 2, 2, 1],
            [3, 3, 3, 3, 2, 2, 2, 2, 1],
            [3, 3, 3, 3, 2, 2, 2, 2, 1],
        ]
        assert table.changed_counts == [4, 1, 1, 0]

    def test_semi_core_plus_trace(self, g9):
        (core, report), table = record_trace(semi_core_plus, g9)
        assert report.node_computations == 23
        assert [sorted(s) for s in table.recomputed[1:]] == [list(range(9)), list(range(9)), [3, 4, 5], [2, 3]]

    def test_semi_core_star_trace(self, g9):
        (core, report), table = record_trace(semi_core_star, g9)
        assert (report.iterations, report.node_computations) == (3, 11)
        assert [sorted(s) for s in table.recomputed[1:]] == [list(range(9)), [5], [4]]

    def test_star_cnt_is_exact(self, g9):
        state, _ = decompose_star(g9)
        assert list(state.cnt) == [3, 3, 3, 3, 3, 4, 3, 2, 1]
        assert not cnt_mismatches(adjacency(g9.edges(), 9), state.core, state.cnt)

    def test_k_max_and_no_writes(self, g9):
        for run in ALGORITHMS.values():
            _, report = run(g9)
            assert report.k_max == 3
            assert report.write_ios == 0


class TestSmallGraphs:
    def test_triangle(self, make_graph):
        g = make_graph([(0, 1), (1, 2), (0, 2)])
        core, report = semi_core(g)
        assert core == [2, 2, 2] and report.iterations == 1

    def test_empty_graph(self, make_graph):
        g = make_graph([], n=0)
        for run in ALGORITHMS.values():
            core, report = run(g)
            assert list(core) == []
        assert semi_core(g)[1].iterations == 1

    def test_isolated_nodes_are_never_recomputed(self, make_graph):
        g = make_graph([(0, 1)], n=4)
        (core, report), table = record_trace(semi_core_star, g)
        assert core == [1, 1, 0, 0]
        assert 2 not in table.recomputed[1] and 3 not in table.recomputed[1]

    def test_star_k15(self, make_graph):
        g = make_graph([(0, leaf) for leaf in range(1, 6)])
        (core, report), table = record_trace(semi_core_star, g)
        assert core == [1] * 6
        assert len(table.computations[1]) == 6
        # the update flag is never raised, so the loop stops after one pass
        assert report.iterations == 1

    def test_im_core_on_clique(self, make_graph):
        g = make_graph([(i, j) for i in range(5) for j in range(i + 1, 5)])
        core, report = im_core(g)
        assert core == [4] * 5 and report.node_computations == 5


edge_lists = st.integers(1, 25).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=80),
    )
)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_equivalence_and_invariants(tmp_path_factory, data):
    n, raw = data
    edges = sorted({(min(e), max(e)) for e in raw})
    from semicore.store import build_from_edges

    g = build_from_edges(edges, tmp_path_factory.mktemp("h"), n=n)
    want = brute_force_core(edges, n)
    results = {}
    for name, run in ALGORITHMS.items():
        if name == "imcore":
            core, report = run(g)
        else:
            (core, report), table = record_trace(run, g)
            # monotone descent and upper-bound safety at each pass boundary
            for prev, cur in zip(table.rows, table.rows[1:]):
                assert all(a >= b for a, b in zip(prev, cur))
                assert all(b >= w for b, w in zip(cur, want))
        assert list(core) == want
        results[name] = report.node_computations
    assert results["semicore-star"] <= results["semicore-plus"] <= results["semicore"]
    state, _ = decompose_star(g)
    assert not cnt_mismatches(adjacency(edges, n), state.core, state.cnt)
    g.close()
