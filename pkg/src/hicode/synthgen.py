"""Layered stochastic blockmodel benchmarks.

Every layer independently assigns each node to one of ``num_communities``
communities uniformly at random and samples each within-community pair as an
edge with probability ``intra_p``. The final graph is the unweighted union of
all layers' edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParam
from .graph import Graph, Layer


@dataclass(frozen=True)
class LayerSpec:
    num_communities: int
    intra_p: float


@dataclass
class SyntheticInstance:
    graph: Graph
    planted: list[Layer]
    n: int
    specs: list[LayerSpec]
    seed: int
    params: dict = field(default_factory=dict)


PRESETS: dict[str, tuple[int, list[LayerSpec]]] = {
    "synl2": (3000, [LayerSpec(100, 0.16), LayerSpec(50, 0.08)]),
    "synl3": (3000, [LayerSpec(100, 0.16), LayerSpec(50, 0.08), LayerSpec(30, 0.048)]),
}


def _validate(n: int, specs) -> None:
    if n < 2:
        raise InvalidParam(f"need at least 2 nodes, got {n}")
    if not specs:
        raise InvalidParam("need at least one layer")
    for s in specs:
        if not 0.0 <= s.intra_p <= 1.0:
            raise InvalidParam(f"intra_p must lie in [0, 1], got {s.intra_p}")
        if not 1 <= s.num_communities <= n:
            raise InvalidParam(f"num_communities must lie in 1..{n}, got {s.num_communities}")


def _sample_layer(rng: np.random.Generator, n: int, spec: LayerSpec):
    labels = rng.integers(0, spec.num_communities, size=n)
    layer = Layer(labels)
    us, vs = [], []
    for members in layer.communities:
        k = len(members)
        if k < 2:
            continue
        iu, iv = np.triu_indices(k, 1)
        hit = rng.random(len(iu)) < spec.intra_p
        us.append(members[iu[hit]])
        vs.append(members[iv[hit]])
    u = np.concatenate(us) if us else np.empty(0, np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, np.int64)
    return layer, u, v


def generate(n: int, specs, seed: int) -> SyntheticInstance:
    """Sample a layered blockmodel graph and its planted partitions."""
    specs = [s if isinstance(s, LayerSpec) else LayerSpec(*s) for s in specs]
    _validate(n, specs)
    rng = np.random.default_rng(seed)
    planted, us, vs = [], [], []
    for spec in specs:
        layer, u, v = _sample_layer(rng, n, spec)
        planted.append(layer)
        us.append(u)
        vs.append(v)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    # Union without summing: an edge drawn by two layers keeps weight 1.
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = np.unique(lo * n + hi)
    graph = Graph(n, key // n, key % n, np.ones(len(key)))
    return SyntheticInstance(graph, planted, n, specs, seed)


def preset(name: str, seed: int) -> SyntheticInstance:
    try:
        n, specs = PRESETS[name]
    except KeyError:
        raise InvalidParam(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    inst = generate(n, specs, seed)
    inst.params["preset"] = name
    return inst


def expected_edge_count(n: int, specs) -> float:
    """Expected number of distinct edges in the union of all layers.

    Two nodes share a community of layer ``l`` with probability
    ``1 / num_communities`` and, independently across layers, are joined there
    with probability ``intra_p``; a pair is an edge unless every layer misses.
    """
    specs = [s if isinstance(s, LayerSpec) else LayerSpec(*s) for s in specs]
    _validate(n, specs)
    miss = 1.0
    for s in specs:
        miss *= 1.0 - s.intra_p / s.num_communities
    return n * (n - 1) / 2.0 * (1.0 - miss)
