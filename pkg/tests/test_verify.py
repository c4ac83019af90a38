import pytest

from semicore.decomp import semi_core_star, semi_core
from semicore.verify import (
    G9_CORES,
    TraceTable,
    brute_force_core,
    compare_cores,
    gen_random_graph,
    locality_violations,
    adjacency,
    record_trace,
    sample_graph_g9,
)


def test_sample_graph_degrees():
    edges = sample_graph_g9()
    assert len(edges) == 15
    assert [len(a) for a in adjacency(edges, 9)] == [3, 3, 4, 6, 3, 5, 3, 2, 1]


@pytest.mark.parametrize(
    "edges, n, expected",
    [
        (sample_graph_g9(), 9, list(G9_CORES)),
        ([(i, j) for i in range(4) for j in range(i + 1, 4)], 4, [3, 3, 3, 3]),
        ([], 1, [0]),
        ([], 0, []),
        ([(0, 1), (1, 2)], 4, [1, 1, 1, 0]),
    ],
)
def test_brute_force(edges, n, expected):
    assert brute_force_core(edges, n) == expected


def test_locality_violations():
    adj = adjacency(sample_graph_g9(), 9)
    assert locality_violations(adj, G9_CORES) == []
    assert locality_violations(adj, [3, 3, 3, 3, 3, 2, 2, 2, 1]) == [4]


class TestGenerators:
    def test_er_empty(self):
        assert gen_random_graph("er", 0, 0.5, 1) == []

    def test_er_complete(self):
        assert len(gen_random_graph("er", 50, 1.0, 7)) == 1225

    @pytest.mark.parametrize("kind, param", [("er", 0.2), ("preferential", 3)])
    def test_deterministic_and_simple(self, kind, param):
        a = gen_random_graph(kind, 60, param, 42)
        assert a == gen_random_graph(kind, 60, param, 42)
        assert all(u < v for u, v in a)
        assert len(set(a)) == len(a)

    def test_seed_matters(self):
        assert gen_random_graph("er", 60, 0.2, 1) != gen_random_graph("er", 60, 0.2, 2)

    def test_preferential_min_degree(self):
        edges = gen_random_graph("preferential", 100, 3, 5)
        deg = [len(a) for a in adjacency(edges, 100)]
        assert min(deg) >= 3

    @pytest.mark.parametrize("kind, param", [("er", 1.5), ("er", -0.1), ("preferential", 0), ("preferential", 1.5), ("ws", 1)])
    def test_bad_params(self, kind, param):
        with pytest.raises(ValueError):
            gen_random_graph(kind, 10, param, 0)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            gen_random_graph("er", -1, 0.5, 0)


def test_compare_cores():
    assert compare_cores([3, 3], [3, 3]) == []
    assert compare_cores((3, 3), (3, 2)) == [(1, 3, 2)]
    with pytest.raises(ValueError):
        compare_cores([1], [1, 2])


def test_star_against_oracle(g9):
    core, _ = semi_core_star(g9)
    assert compare_cores(core, brute_force_core(sample_graph_g9(), 9)) == []


def test_trace_tsv(g9):
    (_, _), table = record_trace(semi_core, g9)
    lines = table.to_tsv().splitlines()
    assert lines[0] == "iteration\tnode\tcore\trecomputed"
    assert len(lines) == 1 + 5 * 9
    assert lines[1] == "init\t0\t3\t0"
    assert "1\t3\t3\t1" in lines


def test_changed_counts_match_rows():
    t = TraceTable(rows=[[3, 2, 1], [2, 2, 1], [2, 1, 0]])
    assert t.changed_counts == [1, 2]
