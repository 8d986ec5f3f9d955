"""Structure-reduction operators.

Each operator takes a graph and one partition of it and returns a new graph in
which that partition's communities are no denser than the background, so a
detector run on the result is no longer drawn to them.

For a community C with ``n_C`` nodes and internal weight ``w_C`` in a graph of
``n`` nodes and total weight ``W``::

    p_C = w_C / (n_C (n_C - 1) / 2)
    q_C = (W - w_C) / ((n (n - 1) - n_C (n_C - 1)) / 2)
    ratio = clip(q_C / p_C, 0, 1)

On unweighted graphs ``w_C`` and ``W`` are plain edge counts. Communities with
``p_C <= q_C`` are left alone; a community covering the whole graph has no
background and gets ``ratio = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, HeterogeneousWeights
from .graph import Graph, Layer, check_layer, community_tallies


class Method(str, Enum):
    REMOVE_EDGE = "remove"
    REDUCE_EDGE = "reduce-edge"
    REDUCE_WEIGHT = "reduce-weight"


@dataclass(frozen=True)
class ReductionSpec:
    method: Method = Method.REDUCE_WEIGHT
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            choices = ", ".join(m.value for m in Method)
            raise ConfigError(f"unknown reduction {self.method!r}; choose from {choices}") from None


@dataclass(frozen=True)
class CommunityDensities:
    """Per-community intra density, background density and reduction ratio."""

    p: np.ndarray
    q: np.ndarray
    ratio: np.ndarray

    def __getitem__(self, c: int) -> tuple[float, float, float]:
        return float(self.p[c]), float(self.q[c]), float(self.ratio[c])


def community_densities(g: Graph, layer: Layer) -> CommunityDensities:
    t = community_tallies(g, layer)
    n = g.n
    nc = t.size.astype(np.float64)
    pairs_in = 0.5 * nc * (nc - 1.0)
    pairs_out = 0.5 * (n * (n - 1.0) - nc * (nc - 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(pairs_in > 0, t.weight / pairs_in, 0.0)
        q = np.where(pairs_out > 0, (g.total_weight - t.weight) / pairs_out, 0.0)
        ratio = np.where(p > 0, np.clip(q / p, 0.0, 1.0), 1.0)
    # Whole-graph community: no background to match, reduce fully.
    ratio = np.where((pairs_out <= 0) & (p > 0), 0.0, ratio)
    # Singletons and communities no denser than the background are untouched.
    ratio = np.where((pairs_in <= 0) | (p <= q) & (pairs_out > 0), 1.0, ratio)
    return CommunityDensities(p, q, ratio)


def _intra_ratio(g: Graph, layer: Layer):
    """Intra-community mask over edges and the ratio each edge's community gets."""
    check_layer(g, layer)
    cu = layer.assignment[g.src]
    intra = cu == layer.assignment[g.dst]
    dens = community_densities(g, layer)
    return intra, cu, dens.ratio


def remove_edge_reduce(g: Graph, layer: Layer) -> Graph:
    """Delete every edge whose endpoints share a community."""
    check_layer(g, layer)
    keep = layer.assignment[g.src] != layer.assignment[g.dst]
    return Graph(g.n, g.src[keep], g.dst[keep], g.weight[keep])


def reduce_edge_reduce(g: Graph, layer: Layer, seed: int) -> Graph:
    """Thin each over-dense community by keeping its edges with probability ``ratio``.

    Every community draws from its own random stream derived from
    ``(seed, community id)``, visiting its edges in canonical edge order.
    """
    if not g.is_unweighted():
        raise HeterogeneousWeights("reduce-edge needs a graph whose edge weights are all equal")
    intra, cu, ratio = _intra_ratio(g, layer)
    keep = np.ones(g.edge_count, dtype=bool)
    for c in np.flatnonzero(ratio < 1.0):
        idx = np.flatnonzero(intra & (cu == c))
        if not len(idx):
            continue
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, int(c)])
        keep[idx] = rng.random(len(idx)) < ratio[c]
    return Graph(g.n, g.src[keep], g.dst[keep], g.weight[keep])


def reduce_weight_reduce(g: Graph, layer: Layer) -> Graph:
    """Scale the internal edge weights of each over-dense community by ``ratio``."""
    intra, cu, ratio = _intra_ratio(g, layer)
    factor = np.where(intra, ratio[cu], 1.0)
    if np.all(factor == 1.0):
        return g
    return g.with_weights(g.weight * factor)


def reduce(g: Graph, layer: Layer, spec: ReductionSpec) -> Graph:
    if spec.method is Method.REMOVE_EDGE:
        return remove_edge_reduce(g, layer)
    if spec.method is Method.REDUCE_EDGE:
        return reduce_edge_reduce(g, layer, spec.seed)
    return reduce_weight_reduce(g, layer)
