import io

import numpy as np
import pytest
from hypothesis import given, settings

from hicode import build_graph, community_tallies
from hicode.errors import IncompleteLayer, InvalidWeight, SelfLoop
from hicode.graph import Graph, Layer
from hicode.io import parse_edge_list, write_edge_list

from .conftest import graph_and_layer, graphs
from .oracles import brute_tallies


def test_build_path():
    g = build_graph([(0, 1), (1, 2)])
    assert (g.n, g.edge_count, g.total_weight) == (3, 2, 2.0)


def test_duplicates_collapse_by_summing():
    g = build_graph([(0, 1, 0.5), (1, 0, 0.5)])
    assert g.edge_count == 1
    assert g.edge_weight(0, 1) == 1.0


def test_self_loop_rejected():
    with pytest.raises(SelfLoop):
        build_graph([(0, 0)])


def test_negative_weight_rejected():
    with pytest.raises(InvalidWeight):
        build_graph([(0, 1, -1.0)])


def test_zero_weight_edge_is_absent():
    g = build_graph([(0, 1, 0.0), (1, 2)])
    assert g.edge_count == 1
    assert g.edge_weight(0, 1) == 0.0


def test_isolated_ids_in_hull_are_kept():
    g = build_graph([(0, 4)])
    assert g.n == 5
    assert g.strength().tolist() == [1, 0, 0, 0, 1]


def test_symmetric_adjacency():
    g = build_graph([(0, 1, 2.0), (2, 1, 3.0)])
    nbrs, ws = g.neighbors(1)
    assert dict(zip(nbrs.tolist(), ws.tolist())) == {0: 2.0, 2: 3.0}
    mat = g.csr()
    assert (mat != mat.T).nnz == 0


def test_layer_compacts_ids():
    layer = Layer([7, 7, 3, 9, 3])
    assert layer.assignment.tolist() == [0, 0, 1, 2, 1]
    assert [c.tolist() for c in layer.communities] == [[0, 1], [2, 4], [3]]


def test_layer_from_communities_requires_partition():
    with pytest.raises(IncompleteLayer):
        Layer.from_communities([[0, 1], [1, 2]], 3)
    with pytest.raises(IncompleteLayer):
        Layer.from_communities([[0, 1]], 3)


def test_tallies_two_triangles(two_triangles):
    t = community_tallies(two_triangles, Layer([0, 0, 0, 1, 1, 1]))
    assert t[0] == (3, 3, 3.0, 0.0)
    assert t[1] == (3, 3, 3.0, 0.0)


def test_tallies_path():
    g = build_graph([(0, 1), (1, 2)])
    t = community_tallies(g, Layer([0, 0, 1]))
    assert t[0] == (2, 1, 1.0, 1.0)
    assert t[1] == (1, 0, 0.0, 1.0)


def test_tallies_reject_short_layer(two_triangles):
    with pytest.raises(IncompleteLayer):
        community_tallies(two_triangles, Layer([0, 0, 0]))


def test_tallies_match_brute_force_on_synl2(synl2):
    g, layer = synl2.graph, synl2.planted[0]
    t = community_tallies(g, layer)
    ref = brute_tallies(g, layer.assignment.tolist())
    for c, (nc, ec, wc, bc) in ref.items():
        assert t[c][:2] == (nc, ec)
        assert t[c][2] == pytest.approx(wc, abs=1e-9)
        assert t[c][3] == pytest.approx(bc, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(graph_and_layer())
def test_tallies_identity_and_brute_force(case):
    g, layer = case
    t = community_tallies(g, layer)
    assert 2 * t.weight.sum() + t.boundary.sum() == pytest.approx(2 * g.total_weight)
    ref = brute_tallies(g, layer.assignment.tolist())
    for c, row in ref.items():
        assert t[c] == pytest.approx(row)


@settings(max_examples=100, deadline=None)
@given(graphs(max_nodes=30))
def test_edge_list_round_trip(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    g2, labels = parse_edge_list(io.StringIO(buf.getvalue()))
    # Undo the first-appearance relabelling.
    perm = np.array([int(x) for x in labels.labels], dtype=np.int64)
    back = Graph.from_arrays(g.n, perm[g2.src], perm[g2.dst], g2.weight)
    assert back.n == g.n
    assert np.array_equal(back.src, g.src) and np.array_equal(back.dst, g.dst)
    np.testing.assert_allclose(back.weight, g.weight, rtol=0, atol=1e-12)
