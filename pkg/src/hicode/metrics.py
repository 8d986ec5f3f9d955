"""Partition quality and similarity measures.

``modularity`` scores one partition against a graph. ``nmi`` compares two
partitions of the same nodes. The JC family compares two *collections* of
communities (possibly overlapping, e.g. several layers concatenated) by
best-match Jaccard similarity, weighted by community size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainMismatch, EmptyCommunitySet, ZeroWeightGraph
from .graph import Graph, Layer, community_tallies


def modularity(g: Graph, layer: Layer) -> float:
    """Newman modularity of ``layer`` on the weighted graph ``g``.

    Each community contributes ``w_in / W - ((2 w_in + w_out) / 2W) ** 2``
    where ``w_in`` is its internal weight, ``w_out`` the weight of edges
    leaving it and ``W`` the total edge weight.
    """
    if g.total_weight <= 0:
        raise ZeroWeightGraph("modularity is undefined on a graph without edge weight")
    t = community_tallies(g, layer)
    W = g.total_weight
    a = (2.0 * t.weight + t.boundary) / (2.0 * W)
    return float(np.sum(t.weight / W - a * a))


def _contingency(a: Layer, b: Layer) -> np.ndarray:
    if a.n != b.n:
        raise DomainMismatch(f"partitions cover {a.n} and {b.n} nodes")
    ones = np.ones(a.n)
    table = sp.coo_matrix(
        (ones, (a.assignment, b.assignment)), shape=(a.num_communities, b.num_communities)
    ).tocsr()
    table.sum_duplicates()
    return table


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(a: Layer, b: Layer) -> float:
    """Normalized mutual information, arithmetic-mean normalisation, natural log.

    Partitions with a single community have zero entropy: two of them score
    1.0, one of them against anything else scores 0.0.
    """
    table = _contingency(a, b)
    n = a.n
    if n == 0:
        raise DomainMismatch("partitions are empty")
    ha = _entropy(a.sizes(), n)
    hb = _entropy(b.sizes(), n)
    trivial_a = a.num_communities <= 1
    trivial_b = b.num_communities <= 1
    if trivial_a and trivial_b:
        return 1.0
    if trivial_a or trivial_b:
        return 0.0
    coo = table.tocoo()
    nij = coo.data
    row = a.sizes()[coo.row]
    col = b.sizes()[coo.col]
    mi = float(np.sum(nij / n * (np.log(nij * n) - np.log(row * col))))
    score = mi / ((ha + hb) / 2.0)
    return min(max(score, 0.0), 1.0)


@dataclass
class MetricReport:
    """A scalar score plus, for JC metrics, the best match of every source community.

    ``matches`` rows are ``(source_index, best_target_index, jaccard)``; the
    target index is -1 when a community overlaps nothing.
    """

    name: str
    score: float
    matches: list[tuple[int, int, float]] = field(default_factory=list)

    def __float__(self) -> float:
        return self.score


def _as_sets(communities) -> list[np.ndarray]:
    if isinstance(communities, Layer):
        return list(communities.communities)
    out = []
    for item in communities:
        if isinstance(item, Layer):
            out.extend(item.communities)
        else:
            out.append(np.fromiter(sorted(set(item)), dtype=np.int64))
    return out


def _incidence(comms: Sequence[np.ndarray], index: dict) -> sp.csr_matrix:
    rows, cols = [], []
    for i, c in enumerate(comms):
        rows.append(np.full(len(c), i, dtype=np.int64))
        cols.append(np.fromiter((index[u] for u in c.tolist()), dtype=np.int64, count=len(c)))
    rows = np.concatenate(rows) if rows else np.empty(0, np.int64)
    cols = np.concatenate(cols) if cols else np.empty(0, np.int64)
    return sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(comms), len(index))
    )


def _best_matches(source, target) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each source community: (size, best target index, best Jaccard)."""
    src = _as_sets(source)
    tgt = _as_sets(target)
    if not src or not tgt or any(len(c) == 0 for c in src) or any(len(c) == 0 for c in tgt):
        raise EmptyCommunitySet("both community sets must be non-empty")
    nodes = sorted(set().union(*(c.tolist() for c in src), *(c.tolist() for c in tgt)))
    index = {u: i for i, u in enumerate(nodes)}
    S = _incidence(src, index)
    T = _incidence(tgt, index)
    overlap = (S @ T.T).tocsr()
    src_size = np.array([len(c) for c in src], dtype=np.float64)
    tgt_size = np.array([len(c) for c in tgt], dtype=np.float64)
    best_j = np.zeros(len(src))
    best_t = np.full(len(src), -1, dtype=np.int64)
    for i in range(len(src)):
        lo, hi = overlap.indptr[i], overlap.indptr[i + 1]
        if lo == hi:
            continue
        cols = overlap.indices[lo:hi]
        ov = overlap.data[lo:hi]
        jac = ov / (src_size[i] + tgt_size[cols] - ov)
        # Ties go to the lowest target index.
        order = np.lexsort((cols, -jac))
        best_t[i] = cols[order[0]]
        best_j[i] = jac[order[0]]
    return src_size, best_t, best_j


def _weighted_best(name, source, target) -> MetricReport:
    size, best_t, best_j = _best_matches(source, target)
    score = float(np.dot(size, best_j) / size.sum())
    matches = [(i, int(t), float(j)) for i, (t, j) in enumerate(zip(best_t, best_j))]
    return MetricReport(name, score, matches)


def jc_precision(detected, truth) -> MetricReport:
    """Size-weighted mean over detected communities of their best Jaccard match in ``truth``."""
    return _weighted_best("jcprecision", detected, truth)


def jc_recall(detected, truth) -> MetricReport:
    """Size-weighted mean over truth communities of their best Jaccard match in ``detected``."""
    return _weighted_best("jcrecall", truth, detected)


def harmonic_mean(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def jc_f1(detected, truth) -> float:
    p = jc_precision(detected, truth).score
    r = jc_recall(detected, truth).score
    return harmonic_mean(p, r)


def jc_scores(detected, truth) -> dict[str, float]:
    """All three JC scores at once."""
    p = jc_precision(detected, truth).score
    r = jc_recall(detected, truth).score
    return {"jcprecision": p, "jcrecall": r, "jcf1": harmonic_mean(p, r)}


def layer_matrix(detected: Iterable[Layer], truth: Iterable[Layer]) -> np.ndarray:
    """JCF1 of every detected layer against every truth layer (rows: truth)."""
    detected = list(detected)
    truth = list(truth)
    out = np.zeros((len(truth), len(detected)))
    for i, t in enumerate(truth):
        for j, d in enumerate(detected):
            out[i, j] = jc_f1(d, t)
    return out
