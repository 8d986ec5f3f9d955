"""Weighted undirected graphs and node partitions.

Graphs are immutable: every transformation (reduction, relabelling) builds a
new :class:`Graph`. Edges are stored once, as ``(u, v)`` with ``u < v`` sorted
lexicographically, plus a symmetric CSR adjacency used by the detectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import IncompleteLayer, InvalidWeight, SelfLoop

# Weights below this are treated as absent.
WEIGHT_EPS = 1e-12


class Graph:
    """Weighted undirected simple graph on dense node ids ``0..n-1``."""

    __slots__ = (
        "n",
        "src",
        "dst",
        "weight",
        "total_weight",
        "_csr",
        "_strength",
    )

    def __init__(self, n: int, src, dst, weight):
        # Trusted constructor: callers guarantee u < v, sorted, unique, w > 0.
        self.n = int(n)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.weight = np.asarray(weight, dtype=np.float64)
        for arr in (self.src, self.dst, self.weight):
            arr.flags.writeable = False
        self.total_weight = float(self.weight.sum())
        self._csr = None
        self._strength = None

    @classmethod
    def from_arrays(cls, n: int, u, v, w=None) -> "Graph":
        """Canonicalise arbitrary edge arrays: orient, sum duplicates, drop zeros."""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if w is None:
            w = np.ones(len(u), dtype=np.float64)
        else:
            w = np.asarray(w, dtype=np.float64).ravel()
        if len(u) != len(v) or len(u) != len(w):
            raise ValueError("edge arrays must have equal length")
        if len(u) and (u.min() < 0 or v.min() < 0):
            raise ValueError("node ids must be non-negative")
        if len(u) and max(u.max(), v.max()) >= n:
            raise ValueError(f"node id out of range for n={n}")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise InvalidWeight("edge weights must be finite and non-negative")
        loops = np.flatnonzero(u == v)
        if len(loops):
            raise SelfLoop(f"self-loop on node {int(u[loops[0]])}")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        key = lo * n + hi
        order = np.argsort(key, kind="stable")
        key = key[order]
        w = w[order]
        uniq, start = np.unique(key, return_index=True)
        summed = np.add.reduceat(w, start) if len(w) else w
        keep = summed >= WEIGHT_EPS
        uniq = uniq[keep]
        return cls(n, uniq // n if n else uniq, uniq % n if n else uniq, summed[keep])

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def m(self) -> int:
        return len(self.src)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count}, total_weight={self.total_weight:g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    __hash__ = None

    def csr(self) -> sp.csr_matrix:
        """Symmetric adjacency matrix (no diagonal)."""
        if self._csr is None:
            rows = np.concatenate([self.src, self.dst])
            cols = np.concatenate([self.dst, self.src])
            vals = np.concatenate([self.weight, self.weight])
            mat = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
            mat.sort_indices()
            self._csr = mat
        return self._csr

    def strength(self) -> np.ndarray:
        """Weighted degree of every node."""
        if self._strength is None:
            s = np.bincount(self.src, weights=self.weight, minlength=self.n)
            s += np.bincount(self.dst, weights=self.weight, minlength=self.n)
            s.flags.writeable = False
            self._strength = s
        return self._strength

    def neighbors(self, u: int):
        """Return ``(neighbor_ids, weights)`` for node ``u``."""
        mat = self.csr()
        lo, hi = mat.indptr[u], mat.indptr[u + 1]
        return mat.indices[lo:hi], mat.data[lo:hi]

    def edges(self):
        """Iterate ``(u, v, w)`` with ``u < v``."""
        return zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())

    def edge_weight(self, u: int, v: int) -> float:
        lo, hi = (u, v) if u < v else (v, u)
        key = self.src * self.n + self.dst
        i = np.searchsorted(key, lo * self.n + hi)
        if i < len(key) and key[i] == lo * self.n + hi:
            return float(self.weight[i])
        return 0.0

    def is_unweighted(self) -> bool:
        """True when all edge weights are equal (trivially true without edges)."""
        return self.edge_count == 0 or bool(np.all(self.weight == self.weight[0]))

    def with_weights(self, weight) -> "Graph":
        """Same edge set with new weights; zero (sub-epsilon) weights are dropped."""
        weight = np.asarray(weight, dtype=np.float64)
        keep = weight >= WEIGHT_EPS
        if keep.all():
            return Graph(self.n, self.src, self.dst, weight)
        return Graph(self.n, self.src[keep], self.dst[keep], weight[keep])

    def scaled(self, factor: float) -> "Graph":
        if factor <= 0:
            raise InvalidWeight("scale factor must be positive")
        return self.with_weights(self.weight * factor)


def build_graph(edge_list: Iterable[Sequence], n: int | None = None) -> Graph:
    """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

    Duplicate pairs are merged by summing their weights. The node id space is
    ``0..max_id`` unless a larger ``n`` is given, so ids that appear in no edge
    are kept as isolated nodes.
    """
    us, vs, ws = [], [], []
    for item in edge_list:
        if len(item) == 2:
            a, b = item
            w = 1.0
        elif len(item) == 3:
            a, b, w = item
        else:
            raise ValueError(f"edge must be (u, v) or (u, v, w), got {item!r}")
        if a == b:
            raise SelfLoop(f"self-loop on node {a}")
        if w < 0:
            raise InvalidWeight(f"negative weight {w} on edge ({a}, {b})")
        us.append(a)
        vs.append(b)
        ws.append(w)
    max_id = max(max(us, default=-1), max(vs, default=-1))
    if n is None:
        n = max_id + 1
    elif n <= max_id:
        raise ValueError(f"n={n} too small for node id {max_id}")
    return Graph.from_arrays(n, us, vs, ws)


def _compact(labels: np.ndarray) -> np.ndarray:
    """Relabel so community ids appear as 0, 1, 2, ... in node order."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.ravel()]


class Layer:
    """A partition of nodes ``0..n-1`` into disjoint communities.

    Community ids are canonical: numbered in order of their lowest node id, so
    two equal partitions always have identical ``assignment`` arrays.
    """

    __slots__ = ("assignment", "_communities")

    def __init__(self, assignment):
        labels = np.asarray(assignment)
        if labels.ndim != 1:
            raise IncompleteLayer("assignment must be one-dimensional")
        if len(labels) and labels.dtype.kind in "iu" and labels.min() < 0:
            raise IncompleteLayer("negative community id in assignment")
        self.assignment = _compact(labels) if len(labels) else labels.astype(np.int64)
        self.assignment.flags.writeable = False
        self._communities = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int], n: int) -> "Layer":
        missing = [u for u in range(n) if u not in mapping]
        if missing:
            raise IncompleteLayer(f"{len(missing)} node(s) without a community, e.g. {missing[0]}")
        return cls([mapping[u] for u in range(n)])

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], n: int) -> "Layer":
        labels = np.full(n, -1, dtype=np.int64)
        for cid, comm in enumerate(communities):
            for u in comm:
                if not 0 <= u < n:
                    raise IncompleteLayer(f"node {u} outside 0..{n - 1}")
                if labels[u] != -1:
                    raise IncompleteLayer(f"node {u} appears in two communities")
                labels[u] = cid
        missing = np.flatnonzero(labels < 0)
        if len(missing):
            raise IncompleteLayer(
                f"{len(missing)} node(s) without a community, e.g. {int(missing[0])}"
            )
        return cls(labels)

    @classmethod
    def singletons(cls, n: int) -> "Layer":
        return cls(np.arange(n))

    @classmethod
    def whole(cls, n: int) -> "Layer":
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def num_communities(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    @property
    def communities(self) -> list[np.ndarray]:
        """Member arrays, indexed by community id."""
        if self._communities is None:
            order = np.argsort(self.assignment, kind="stable")
            cuts = np.cumsum(np.bincount(self.assignment, minlength=self.num_communities))
            self._communities = np.split(order, cuts[:-1]) if len(order) else []
        return self._communities

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_communities)

    def __len__(self) -> int:
        return self.num_communities

    def __eq__(self, other) -> bool:
        if not isinstance(other, Layer):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Layer(n={self.n}, communities={self.num_communities})"


def check_layer(g: Graph, layer: Layer) -> None:
    if layer.n != g.n:
        raise IncompleteLayer(f"layer covers {layer.n} nodes but graph has {g.n}")


@dataclass(frozen=True)
class CommunityTallies:
    """Per-community counts: sizes, intra edges, intra weight, boundary weight."""

    size: np.ndarray
    edges: np.ndarray
    weight: np.ndarray
    boundary: np.ndarray

    def __len__(self) -> int:
        return len(self.size)

    def __getitem__(self, c: int) -> tuple[int, int, float, float]:
        return (int(self.size[c]), int(self.edges[c]), float(self.weight[c]), float(self.boundary[c]))


def community_tallies(g: Graph, layer: Layer) -> CommunityTallies:
    check_layer(g, layer)
    c = layer.num_communities
    a = layer.assignment
    cu = a[g.src]
    cv = a[g.dst]
    intra = cu == cv
    edges = np.bincount(cu[intra], minlength=c)
    weight = np.bincount(cu[intra], weights=g.weight[intra], minlength=c)
    cross = ~intra
    boundary = np.bincount(cu[cross], weights=g.weight[cross], minlength=c)
    boundary += np.bincount(cv[cross], weights=g.weight[cross], minlength=c)
    return CommunityTallies(layer.sizes(), edges, weight, boundary)
