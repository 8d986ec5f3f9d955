import numpy as np
import pytest
from hypothesis import strategies as st

from hicode import PipelineConfig, build_graph, preset, run_hicode
from hicode.graph import Graph, Layer

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def clique_edges(nodes):
    nodes = list(nodes)
    return [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1 :]]


@pytest.fixture
def two_triangles():
    return build_graph(clique_edges([0, 1, 2]) + clique_edges([3, 4, 5]))


@pytest.fixture
def bridged_cliques():
    """Two 5-cliques joined by the edge (4, 5)."""
    return build_graph(clique_edges(range(5)) + clique_edges(range(5, 10)) + [(4, 5)])


@pytest.fixture(scope="session")
def synl2():
    return preset("synl2", 0)


@pytest.fixture(scope="session")
def synl3():
    return preset("synl3", 0)


@pytest.fixture(scope="session")
def synl3_run(synl3):
    return run_hicode(synl3.graph, PipelineConfig(seed=0), truth=synl3.planted)


def random_graph(rng: np.random.Generator, n: int, p: float, weighted: bool = False) -> Graph:
    iu, iv = np.triu_indices(n, 1)
    hit = rng.random(len(iu)) < p
    w = rng.uniform(0.1, 3.0, hit.sum()) if weighted else None
    return Graph.from_arrays(n, iu[hit], iv[hit], w)


@st.composite
def graphs(draw, min_nodes=1, max_nodes=25, weighted=True):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=60)) if pairs else []
    if weighted:
        ws = draw(st.lists(st.floats(0.05, 5.0), min_size=len(chosen), max_size=len(chosen)))
    else:
        ws = [1.0] * len(chosen)
    return build_graph([(u, v, w) for (u, v), w in zip(chosen, ws)], n=n)


@st.composite
def graph_and_layer(draw, **kw):
    g = draw(graphs(**kw))
    k = draw(st.integers(1, max(1, g.n)))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=g.n, max_size=g.n))
    return g, Layer(labels)
