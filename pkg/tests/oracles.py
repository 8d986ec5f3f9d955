"""Slow, obviously-correct reference implementations used only by tests."""

import itertools
import math

import numpy as np


def dense_adjacency(g):
    A = np.zeros((g.n, g.n))
    for u, v, w in g.edges():
        A[u, v] = A[v, u] = w
    return A


def brute_modularity(g, assignment):
    """(1/2m) * sum over all ordered node pairs of (A_ij - k_i k_j / 2m) [c_i == c_j]."""
    A = dense_adjacency(g)
    k = A.sum(axis=1)
    two_m = A.sum()
    q = 0.0
    for i in range(g.n):
        for j in range(g.n):
            if assignment[i] == assignment[j]:
                q += A[i, j] - k[i] * k[j] / two_m
    return q / two_m


def brute_tallies(g, assignment):
    """Per community id: (n_C, e_C, w_C, boundary) from a plain edge scan."""
    out = {}
    for c in set(assignment):
        out[c] = [sum(1 for a in assignment if a == c), 0, 0.0, 0.0]
    for u, v, w in g.edges():
        cu, cv = assignment[u], assignment[v]
        if cu == cv:
            out[cu][1] += 1
            out[cu][2] += w
        else:
            out[cu][3] += w
            out[cv][3] += w
    return {c: tuple(t) for c, t in out.items()}


def brute_jc(source, target):
    """Size-weighted mean over ``source`` of the best Jaccard against ``target``."""
    num = den = 0.0
    for s in source:
        s = set(s)
        best = max(len(s & set(t)) / len(s | set(t)) for t in target)
        num += len(s) * best
        den += len(s)
    return num / den


def brute_nmi(a, b):
    n = len(a)
    ca, cb = set(a), set(b)
    pa = {x: sum(1 for v in a if v == x) / n for x in ca}
    pb = {y: sum(1 for v in b if v == y) / n for y in cb}
    mi = 0.0
    for x in ca:
        for y in cb:
            pxy = sum(1 for u in range(n) if a[u] == x and b[u] == y) / n
            if pxy > 0:
                mi += pxy * math.log(pxy / (pa[x] * pb[y]))
    ha = -sum(p * math.log(p) for p in pa.values())
    hb = -sum(p * math.log(p) for p in pb.values())
    return mi / ((ha + hb) / 2)


def set_partitions(items):
    """Every partition of ``items`` as a list of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def to_assignment(blocks, n):
    a = [0] * n
    for c, block in enumerate(blocks):
        for u in block:
            a[u] = c
    return a


def binomial_sigma(n, p):
    return math.sqrt(n * p * (1 - p))


def all_permutations(n):
    return itertools.permutations(range(n))
