"""Hidden community detection: identification, refinement and layer-count selection.

Identification runs the base detector, reduces the structure it found, and
repeats on the running reduced graph. Refinement then revisits each layer,
re-detecting it on the original graph with every *other* layer reduced. The
number of layers is chosen by probing how much a few refinement sweeps improve
modularity as layers are added.

All randomness comes from the master seed through :func:`stage_seed`, keyed by
stage, layer index, sweep index and (for reductions) the reduced layer.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .detectors import Detector, get_detector
from .errors import ConfigError
from .graph import Graph, Layer
from .metrics import modularity, nmi
from .reduction import Method, ReductionSpec, reduce

logger = logging.getLogger(__name__)

STAGE_TAGS = {
    "identify": 1,
    "identify-reduce": 2,
    "refine": 3,
    "refine-reduce": 4,
    "measure-reduce": 5,
}


def stage_seed(master: int, stage: str, layer: int, sweep: int = 0, other: int = 0) -> int:
    """64-bit seed for one stage of a run; a pure function of its arguments."""
    entropy = [master & 0xFFFFFFFFFFFFFFFF, STAGE_TAGS[stage], layer, sweep, other]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


@dataclass
class PipelineConfig:
    detector: str = "louvain"
    reduction: Method | str = Method.REDUCE_WEIGHT
    max_layers: int = 8
    fixed_layers: int | None = None
    refine_iters: int = 30
    probe_iters: int = 5
    seed: int = 0

    def __post_init__(self):
        try:
            self.reduction = Method(self.reduction)
        except ValueError:
            choices = ", ".join(m.value for m in Method)
            raise ConfigError(f"unknown reduction {self.reduction!r}; choose from {choices}") from None

    def validate(self) -> None:
        if self.max_layers < 2:
            raise ConfigError("max_layers must be at least 2")
        if self.fixed_layers is not None and not 1 <= self.fixed_layers <= self.max_layers:
            raise ConfigError("fixed_layers must lie in 1..max_layers")
        if self.refine_iters < 0 or self.probe_iters < 0:
            raise ConfigError("iteration counts must be non-negative")
        if self.probe_iters > self.refine_iters:
            raise ConfigError("probe_iters cannot exceed refine_iters")
        det = get_detector(self.detector)
        if self.reduction is Method.REDUCE_WEIGHT and not det.supports_weights:
            raise ConfigError(f"detector {det.name!r} ignores weights; reduce-weight needs one that does")

    def make_detector(self) -> Detector:
        self.validate()
        return get_detector(self.detector)


@dataclass
class SweepRecord:
    """Scores of every layer after one refinement sweep (sweep 0: after identification).

    ``nmi`` is indexed ``[detected layer][truth layer]`` when truth was supplied.
    """

    sweep: int
    orig: list[float]
    reduced: list[float]
    nmi: list[list[float]] | None = None

    @property
    def avg_orig(self) -> float:
        return float(np.mean(self.orig))

    @property
    def avg_reduced(self) -> float:
        return float(np.mean(self.reduced))


@dataclass
class SelectionRow:
    num_layers: int
    orig_0: float
    red_0: float
    orig_probe: float
    red_probe: float

    @property
    def delta(self) -> float:
        return self.orig_probe / self.orig_0 if self.orig_0 > 0 else float("nan")

    @property
    def delta_prime(self) -> float:
        return self.red_probe / self.red_0 if self.red_0 > 0 else float("nan")

    @property
    def degenerate(self) -> bool:
        return self.orig_0 <= 0 or self.red_0 <= 0


@dataclass
class Selection:
    """Outcome of automatic layer-count selection.

    ``trigger`` names the rule that stopped the search: ``"delta"`` (refinement
    lowered original-graph modularity for one more layer), ``"delta_prime"``
    (reduced-graph improvement dropped), ``"degenerate"`` (non-positive
    modularity baseline) or ``"max_layers"`` (cap reached; ``truncated``).
    """

    num_layers: int
    trigger: str
    truncated: bool
    rows: list[SelectionRow]

    def __int__(self) -> int:
        return self.num_layers


@dataclass
class LayerStack:
    layers: list[Layer]
    orig_modularity: list[float]
    reduced_modularity: list[float]
    trace: list[SweepRecord] = field(default_factory=list)
    selected_sweep: int = 0
    selection: Selection | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def avg_reduced_modularity(self) -> float:
        return float(np.mean(self.reduced_modularity))

    @property
    def communities(self) -> list[np.ndarray]:
        """Every community of every layer, in layer order."""
        return [c for layer in self.layers for c in layer.communities]


def _safe_modularity(g: Graph, layer: Layer) -> float:
    return modularity(g, layer) if g.total_weight > 0 else 0.0


def reduced_graph(
    g: Graph, layers: Sequence[Layer], skip: int, cfg: PipelineConfig, stage: str, sweep: int
) -> Graph:
    """``g`` with every layer except ``layers[skip]`` reduced, in layer order."""
    out = g
    for j, layer in enumerate(layers):
        if j == skip:
            continue
        spec = ReductionSpec(cfg.reduction, stage_seed(cfg.seed, stage, skip, sweep, j))
        out = reduce(out, layer, spec)
    return out


def measure(g: Graph, layers: Sequence[Layer], cfg: PipelineConfig, sweep: int, truth=None) -> SweepRecord:
    orig = [_safe_modularity(g, layer) for layer in layers]
    red = [
        _safe_modularity(reduced_graph(g, layers, i, cfg, "measure-reduce", sweep), layer)
        for i, layer in enumerate(layers)
    ]
    table = None
    if truth is not None:
        table = [[nmi(layer, t) for t in truth] for layer in layers]
    return SweepRecord(sweep, orig, red, table)


def _identify_layers(g: Graph, cfg: PipelineConfig, detector: Detector, n_layers: int, start=()):
    """Extend the identified prefix ``start`` to ``n_layers`` layers."""
    layers = list(start)
    running = g
    for i, layer in enumerate(layers):
        running = reduce(running, layer, ReductionSpec(cfg.reduction, stage_seed(cfg.seed, "identify-reduce", i)))
    while len(layers) < n_layers:
        i = len(layers)
        layer = detector.detect(running, stage_seed(cfg.seed, "identify", i))
        layers.append(layer)
        if len(layers) < n_layers:
            running = reduce(running, layer, ReductionSpec(cfg.reduction, stage_seed(cfg.seed, "identify-reduce", i)))
    return layers


def _stack_from(layers, record: SweepRecord, trace, selected: int) -> LayerStack:
    return LayerStack(list(layers), list(record.orig), list(record.reduced), trace, selected)


def identify(g: Graph, cfg: PipelineConfig, n_layers: int, truth=None, _prefix=()) -> LayerStack:
    """Detect ``n_layers`` layers, reducing each one before looking for the next."""
    if n_layers < 1:
        raise ConfigError("n_layers must be at least 1")
    detector = cfg.make_detector()
    t0 = time.perf_counter()
    layers = _identify_layers(g, cfg, detector, n_layers, _prefix)
    record = measure(g, layers, cfg, 0, truth)
    stack = _stack_from(layers, record, [record], 0)
    stack.timings["identify"] = time.perf_counter() - t0
    return stack


def _sweeps(g: Graph, layers, cfg: PipelineConfig, detector: Detector, iters: int, truth):
    """Yield ``(layers, record)`` after each of ``iters`` Gauss-Seidel sweeps."""
    layers = list(layers)
    for s in range(1, iters + 1):
        for i in range(len(layers)):
            red = reduced_graph(g, layers, i, cfg, "refine-reduce", s)
            layers[i] = detector.detect(red, stage_seed(cfg.seed, "refine", i, s))
        yield list(layers), measure(g, layers, cfg, s, truth)


def refine(g: Graph, stack: LayerStack, cfg: PipelineConfig, truth=None, iters: int | None = None) -> LayerStack:
    """Re-detect every layer against all others reduced; keep the best sweep.

    The returned layers are those of the sweep with the highest average
    modularity in the reduced graphs. With zero sweeps the input is returned.
    """
    iters = cfg.refine_iters if iters is None else iters
    if iters == 0:
        return stack
    detector = cfg.make_detector()
    t0 = time.perf_counter()
    trace = list(stack.trace) if stack.trace else [measure(g, stack.layers, cfg, 0, truth)]
    best = None
    for layers, record in _sweeps(g, stack.layers, cfg, detector, iters, truth):
        trace.append(record)
        if best is None or record.avg_reduced > best[1].avg_reduced:
            best = (layers, record)
        logger.debug("sweep %d: avg reduced modularity %.4f", record.sweep, record.avg_reduced)
    out = _stack_from(best[0], best[1], trace, best[1].sweep)
    out.selection = stack.selection
    out.timings = dict(stack.timings)
    out.timings["refine"] = time.perf_counter() - t0
    return out


def _probe(g: Graph, cfg: PipelineConfig, detector: Detector, layers) -> SelectionRow:
    rec0 = measure(g, layers, cfg, 0)
    orig, red = [], []
    for _, rec in _sweeps(g, layers, cfg, detector, cfg.probe_iters, None):
        orig.append(rec.avg_orig)
        red.append(rec.avg_reduced)
    orig_p = float(np.mean(orig)) if orig else rec0.avg_orig
    red_p = float(np.mean(red)) if red else rec0.avg_reduced
    return SelectionRow(len(layers), rec0.avg_orig, rec0.avg_reduced, orig_p, red_p)


def select_num_layers(g: Graph, cfg: PipelineConfig, _cache: dict | None = None) -> Selection:
    """Smallest ``i >= 2`` whose successor shows refinement hurting or helping less.

    Stops at ``i`` when ``delta[i+1] < 1`` or ``delta'[i] > delta'[i+1]``, where
    ``delta`` compares mean original-graph modularity over the first probe
    sweeps to the post-identification value and ``delta'`` does the same in
    the reduced graphs.
    """
    detector = cfg.make_detector()
    layers = _identify_layers(g, cfg, detector, 2)
    rows = [_probe(g, cfg, detector, layers)]
    if _cache is not None:
        _cache[2] = list(layers)

    def done(num, trigger, truncated=False):
        logger.info("selected %d layers (%s)", num, trigger)
        return Selection(num, trigger, truncated, rows)

    if rows[0].degenerate:
        return done(2, "degenerate")
    i = 2
    while True:
        if i + 1 > cfg.max_layers:
            return done(cfg.max_layers, "max_layers", truncated=True)
        layers = _identify_layers(g, cfg, detector, i + 1, layers)
        if _cache is not None:
            _cache[i + 1] = list(layers)
        nxt = _probe(g, cfg, detector, layers)
        rows.append(nxt)
        cur = rows[-2]
        if nxt.degenerate:
            return done(i, "degenerate")
        if nxt.delta < 1.0:
            return done(i, "delta")
        if cur.delta_prime > nxt.delta_prime:
            return done(i, "delta_prime")
        i += 1


def run_hicode(g: Graph, cfg: PipelineConfig, truth=None) -> LayerStack:
    """Full pipeline: choose the layer count (unless fixed), identify, refine."""
    cfg.validate()
    timings = {}
    selection = None
    prefix = ()
    if cfg.fixed_layers is not None:
        n_layers = cfg.fixed_layers
    else:
        t0 = time.perf_counter()
        cache: dict = {}
        selection = select_num_layers(g, cfg, cache)
        timings["select"] = time.perf_counter() - t0
        n_layers = selection.num_layers
        prefix = cache.get(n_layers, ())
    stack = identify(g, cfg, n_layers, truth, _prefix=prefix)
    stack.selection = selection
    stack.timings = {**timings, **stack.timings}
    return refine(g, stack, cfg, truth)


def run_cascade(g: Graph, cfg: PipelineConfig, truth=None) -> LayerStack:
    """Repeated detect-and-delete-intra-edges baseline; no refinement."""
    if cfg.fixed_layers is None:
        raise ConfigError("cascade needs a fixed number of layers")
    cascade_cfg = replace(cfg, reduction=Method.REMOVE_EDGE)
    return identify(g, cascade_cfg, cfg.fixed_layers, truth)
