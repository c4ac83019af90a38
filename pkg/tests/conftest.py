import pytest

from semicore.decomp import decompose_star
from semicore.store import build_from_edge_list, build_from_edges
from semicore.verify import g9_text


@pytest.fixture
def g9(tmp_path):
    g = build_from_edge_list(g9_text().splitlines(), tmp_path / "g9")
    yield g
    g.close()


@pytest.fixture
def g9_state(g9):
    state, _ = decompose_star(g9)
    return g9, state


@pytest.fixture
def make_graph(tmp_path):
    """Factory writing dense edge lists into fresh directories."""
    made = []

    def make(edges, n=None, **kwargs):
        g = build_from_edges(edges, tmp_path / f"g{len(made)}", n=n, **kwargs)
        made.append(g)
        return g

    yield make
    for g in made:
        g.close()
