"""Hidden community detection: find the dominant community layer of a network
and the weaker layers hidden behind it."""

from .detectors import Detector, LabelPropagation, Louvain, get_detector, label_propagation_detect, louvain_detect
from .errors import *  # noqa: F401,F403
from .graph import CommunityTallies, Graph, Layer, build_graph, community_tallies
from .metrics import MetricReport, jc_f1, jc_precision, jc_recall, jc_scores, layer_matrix, modularity, nmi
from .pipeline import (
    LayerStack,
    PipelineConfig,
    Selection,
    identify,
    refine,
    run_cascade,
    run_hicode,
    select_num_layers,
)
from .reduction import (
    Method,
    ReductionSpec,
    community_densities,
    reduce,
    reduce_edge_reduce,
    reduce_weight_reduce,
    remove_edge_reduce,
)
from .synthgen import LayerSpec, SyntheticInstance, expected_edge_count, generate, preset

__version__ = "0.1.0"
