"""Base community detectors.

A detector is anything with a ``name``, a ``supports_weights`` flag and a
``detect(graph, seed) -> Layer`` method. Two ship with the package: a
Louvain modularity optimiser (weighted) and synchronous label propagation
(weight-blind).
"""

from __future__ import annotations

from typing import Protocol

import numba
import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, EmptyGraph
from .graph import Graph, Layer

# Minimum modularity gain for a local move to count as an improvement.
MOVE_EPS = 1e-9
MAX_PASSES = 10_000
LABELPROP_MAX_ROUNDS = 100


class Detector(Protocol):
    name: str
    supports_weights: bool

    def detect(self, g: Graph, seed: int) -> Layer: ...


def _level_seed(seed: int, level: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, level]).generate_state(1)[0])


@numba.njit(cache=True)
def _local_moves(indptr, indices, data, strength, comm, two_w, rng_seed, eps):
    """One Louvain local-moving phase, in place on ``comm``.

    Nodes are visited in a fresh random order each pass. A node moves to the
    neighbouring community with the largest gain, and only when that beats
    staying put by more than ``eps`` in modularity. Returns True if any node
    moved.
    """
    np.random.seed(rng_seed)
    n = len(strength)
    w = two_w / 2.0
    tot = np.zeros(n)
    for i in range(n):
        tot[comm[i]] += strength[i]
    neigh_w = np.zeros(n)
    touched = np.empty(n, dtype=np.int64)
    any_move = False
    for _ in range(MAX_PASSES):
        order = np.random.permutation(n)
        moves = 0
        for idx in range(n):
            i = order[idx]
            ki = strength[i]
            ci = comm[i]
            nt = 0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    continue
                c = comm[j]
                if neigh_w[c] == 0.0:
                    touched[nt] = c
                    nt += 1
                neigh_w[c] += data[p]
            tot[ci] -= ki
            stay = neigh_w[ci] - tot[ci] * ki / two_w
            best = ci
            best_gain = stay
            for t in range(nt):
                c = touched[t]
                gain = neigh_w[c] - tot[c] * ki / two_w
                if gain > best_gain:
                    best_gain = gain
                    best = c
            if best != ci and (best_gain - stay) / w <= eps:
                best = ci
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moves += 1
            for t in range(nt):
                neigh_w[touched[t]] = 0.0
        if moves == 0:
            break
        any_move = True
    return any_move


def _aggregate(mat: sp.csr_matrix, labels: np.ndarray, k: int) -> sp.csr_matrix:
    n = mat.shape[0]
    proj = sp.csr_matrix((np.ones(n), (np.arange(n), labels)), shape=(n, k))
    agg = (proj.T @ mat @ proj).tocsr()
    agg.sum_duplicates()
    agg.sort_indices()
    return agg


class Louvain:
    """Multi-level modularity maximisation with seeded random visit order."""

    name = "louvain"
    supports_weights = True

    def __init__(self, eps: float = MOVE_EPS):
        self.eps = eps

    def detect(self, g: Graph, seed: int) -> Layer:
        if g.n == 0:
            raise EmptyGraph("cannot detect communities in an empty graph")
        if g.total_weight <= 0:
            return Layer.singletons(g.n)
        mat = g.csr().astype(np.float64)
        strength = np.asarray(g.strength(), dtype=np.float64).copy()
        two_w = 2.0 * g.total_weight
        membership = np.arange(g.n, dtype=np.int64)
        level = 0
        while True:
            k = mat.shape[0]
            comm = np.arange(k, dtype=np.int64)
            moved = _local_moves(
                mat.indptr.astype(np.int64),
                mat.indices.astype(np.int64),
                mat.data,
                strength,
                comm,
                two_w,
                _level_seed(seed, level),
                self.eps,
            )
            if not moved:
                break
            labels = Layer(comm).assignment
            nc = int(labels.max()) + 1
            membership = labels[membership]
            if nc == k:
                break
            mat = _aggregate(mat, labels, nc)
            strength = np.bincount(labels, weights=strength, minlength=nc)
            level += 1
        return Layer(membership)


def _propagate(g: Graph, priority: np.ndarray, max_rounds: int) -> np.ndarray:
    """Synchronous label propagation with a fixed label priority for ties.

    Each node counts its own label once plus one vote per neighbour and adopts
    the most frequent label; among equally frequent labels the one with the
    highest ``priority`` wins. Stops when a round changes nothing.
    """
    n = g.n
    mat = g.csr()
    rows = np.repeat(np.arange(n), np.diff(mat.indptr))
    cols = mat.indices.astype(np.int64)
    voter_node = np.concatenate([rows, np.arange(n)])
    labels = np.arange(n, dtype=np.int64)
    for _ in range(max_rounds):
        voter_label = np.concatenate([labels[cols], labels])
        key = voter_node * n + voter_label
        uniq, counts = np.unique(key, return_counts=True)
        node = uniq // n
        lab = uniq % n
        order = np.lexsort((-priority[lab], -counts, node))
        node_sorted = node[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = node_sorted[1:] != node_sorted[:-1]
        new = np.empty(n, dtype=np.int64)
        new[node_sorted[first]] = lab[order][first]
        if np.array_equal(new, labels):
            break
        labels = new
    return labels


class LabelPropagation:
    """Synchronous majority-label propagation; ignores edge weights."""

    name = "labelprop"
    supports_weights = False

    def __init__(self, max_rounds: int = LABELPROP_MAX_ROUNDS):
        self.max_rounds = max_rounds

    def detect(self, g: Graph, seed: int) -> Layer:
        if g.n == 0:
            raise EmptyGraph("cannot detect communities in an empty graph")
        priority = np.random.default_rng(seed).permutation(g.n)
        return Layer(_propagate(g, priority, self.max_rounds))


def louvain_detect(g: Graph, seed: int) -> Layer:
    return Louvain().detect(g, seed)


def label_propagation_detect(g: Graph, seed: int) -> Layer:
    return LabelPropagation().detect(g, seed)


DETECTORS = {
    "louvain": Louvain,
    "labelprop": LabelPropagation,
}


def get_detector(name: str) -> Detector:
    try:
        return DETECTORS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown detector {name!r}; choose from {', '.join(sorted(DETECTORS))}"
        ) from None
