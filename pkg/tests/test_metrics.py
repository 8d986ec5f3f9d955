import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from hicode import build_graph, jc_f1, jc_precision, jc_recall, modularity, nmi
from hicode.errors import DomainMismatch, EmptyCommunitySet, ZeroWeightGraph
from hicode.graph import Layer
from hicode.metrics import harmonic_mean

from .conftest import graph_and_layer, random_graph
from .oracles import brute_jc, brute_modularity, brute_nmi


def test_whole_graph_community_has_zero_modularity(bridged_cliques):
    assert modularity(bridged_cliques, Layer.whole(10)) == pytest.approx(0.0, abs=1e-15)


def test_two_triangles_modularity(two_triangles):
    # Each triangle: 3/6 - (6/12)^2 = 0.25.
    assert modularity(two_triangles, Layer([0, 0, 0, 1, 1, 1])) == pytest.approx(0.5)


def test_modularity_needs_edges():
    with pytest.raises(ZeroWeightGraph):
        modularity(build_graph([], n=3), Layer([0, 1, 2]))


def test_planted_synl2_modularity(synl2):
    got = [modularity(synl2.graph, layer) for layer in synl2.planted]
    assert got == pytest.approx([0.491, 0.492], abs=0.02)


@pytest.mark.parametrize("seed", range(10))
def test_modularity_matches_pair_sum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 120))
    g = random_graph(rng, n, float(rng.uniform(0.02, 0.3)), weighted=bool(seed % 2))
    if g.total_weight == 0:
        return
    labels = rng.integers(0, int(rng.integers(1, 8)), n)
    assert modularity(g, Layer(labels)) == pytest.approx(brute_modularity(g, labels), abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(graph_and_layer(), st.floats(0.01, 100.0))
def test_modularity_range_and_scale_invariance(case, lam):
    g, layer = case
    if g.total_weight == 0:
        return
    q = modularity(g, layer)
    assert -0.5 <= q < 1.0
    assert modularity(g.scaled(lam), layer) == pytest.approx(q, abs=1e-12)


def test_nmi_identity_and_relabel():
    a = Layer([0, 0, 1, 1, 2, 2])
    assert nmi(a, a) == pytest.approx(1.0)
    assert nmi(a, Layer([5, 5, 3, 3, 9, 9])) == pytest.approx(1.0)


def test_nmi_trivial_conventions():
    whole = Layer.whole(4)
    assert nmi(whole, whole) == 1.0
    assert nmi(whole, Layer([0, 0, 1, 1])) == 0.0
    assert nmi(Layer([0, 0, 1, 1]), whole) == 0.0


def test_nmi_domain_mismatch():
    with pytest.raises(DomainMismatch):
        nmi(Layer([0, 1]), Layer([0, 1, 1]))


@pytest.mark.parametrize("seed", range(5))
def test_nmi_independent_partitions_near_zero(seed):
    parity = Layer(np.arange(1000) % 2)
    rand = Layer(np.random.default_rng(seed).integers(0, 2, 1000))
    assert nmi(parity, rand) <= 0.02


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 5), min_size=n, max_size=n))))
def test_nmi_against_references(pair):
    a, b = (Layer(x) for x in pair)
    got = nmi(a, b)
    assert got == pytest.approx(nmi(b, a), abs=1e-12)
    assert 0.0 <= got <= 1.0
    if a.num_communities > 1 and b.num_communities > 1:
        ref = normalized_mutual_info_score(pair[0], pair[1], average_method="arithmetic")
        assert got == pytest.approx(ref, abs=1e-9)
        assert got == pytest.approx(brute_nmi(pair[0], pair[1]), abs=1e-9)


def test_jc_identity():
    comms = [[0, 1, 2], [3, 4], [5]]
    assert jc_precision(comms, comms).score == pytest.approx(1.0)
    assert jc_recall(comms, comms).score == pytest.approx(1.0)
    assert jc_f1(comms, comms) == pytest.approx(1.0)


def test_jc_union_against_equal_parts():
    truth = [list(range(i * 5, i * 5 + 5)) for i in range(4)]
    detected = [list(range(20))]
    assert jc_precision(detected, truth).score == pytest.approx(1 / 4)


def test_jc_recall_whole_truth():
    truth = [list(range(10))]
    detected = [[0, 1, 2, 3, 4, 5], [6, 7], [8, 9]]
    assert jc_recall(detected, truth).score == pytest.approx(6 / 10)


def test_jc_f1_harmonic():
    assert harmonic_mean(1.0, 1.0) == 1.0
    assert harmonic_mean(1.0, 0.0) == 0.0
    assert harmonic_mean(0.0, 0.0) == 0.0


def test_jc_rejects_empty():
    with pytest.raises(EmptyCommunitySet):
        jc_precision([], [[1]])
    with pytest.raises(EmptyCommunitySet):
        jc_recall([[1]], [[]])


def test_jc_report_matches():
    rep = jc_precision([[0, 1], [7]], [[0, 1, 2], [3]])
    assert rep.matches[0][:2] == (0, 0)
    assert rep.matches[0][2] == pytest.approx(2 / 3)
    assert rep.matches[1] == (1, -1, 0.0)


def test_jc_accepts_layers():
    a = Layer([0, 0, 1, 1])
    assert jc_f1([a], [[0, 1], [2, 3]]) == pytest.approx(1.0)


communities = st.lists(st.sets(st.integers(0, 30), min_size=1, max_size=12), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(communities, communities)
def test_jc_role_symmetry_and_brute_force(det, truth):
    p = jc_precision(det, truth).score
    assert p == jc_recall(truth, det).score
    assert p == pytest.approx(brute_jc(det, truth), abs=1e-12)
    assert jc_recall(det, truth).score == pytest.approx(brute_jc(truth, det), abs=1e-12)
    assert 0.0 <= jc_f1(det, truth) <= 1.0


@settings(max_examples=50, deadline=None)
@given(communities, communities, st.randoms(use_true_random=False))
def test_jc_invariant_under_reordering_and_relabelling(det, truth, rnd):
    base = jc_f1(det, truth)
    perm = list(range(31))
    rnd.shuffle(perm)
    det2 = [{perm[u] for u in c} for c in det]
    truth2 = [{perm[u] for u in c} for c in truth]
    rnd.shuffle(det2)
    rnd.shuffle(truth2)
    assert jc_f1(det2, truth2) == pytest.approx(base, abs=1e-12)
