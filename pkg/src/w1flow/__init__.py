"""Approximate 1-Wasserstein distances between persistence diagrams.

The transport problem between two diagrams is sparsified twice (node
condensation onto a perturbed lattice, then a well-separated-pair spanner
over the surviving nodes) and solved as an uncapacitated min-cost flow with
a block-pivot network simplex.  Exact oracles, sound lower bounds and a
staged nearest-neighbor search ride along for validation and retrieval.
"""

from .condensation import CondensationParams, compute_delta, delta_condense, snap_point
from .diagram import (
    DiagramFormatError,
    PDPoint,
    PersistenceDiagram,
    SuppliedNodes,
    diagonal_distance,
    diagonal_projection,
    load_diagram,
    parse_diagram,
    serialize_diagram,
    zero_condense,
)
from .lower_bound import PlanarIndex, rwmd, wcd
from .network import NetworkError, TransshipmentNetwork, assemble, build_network
from .oracle import OracleSizeError, exact_w1_bruteforce, exact_w1_dense
from .pipeline import (
    ApproxParams,
    PipelineSpec,
    PipelineStage,
    approx_w1,
    nn_search,
    s_from_error,
    total_error_factor,
)
from .simplex import (
    ABORTED_STALLING,
    OPTIMAL,
    FlowResult,
    InfeasibleNetworkError,
    find_entering_arc,
    solve,
)
from .spanner import (
    ArcList,
    SplitTree,
    WSPairList,
    build_split_tree,
    build_wspd,
    count_pairs,
    emit_arcs,
    well_separated,
    write_pairs,
)

__version__ = "0.1.0"

__all__ = [
    "ABORTED_STALLING",
    "ApproxParams",
    "ArcList",
    "CondensationParams",
    "DiagramFormatError",
    "FlowResult",
    "InfeasibleNetworkError",
    "NetworkError",
    "OPTIMAL",
    "OracleSizeError",
    "PDPoint",
    "PersistenceDiagram",
    "PipelineSpec",
    "PipelineStage",
    "PlanarIndex",
    "SplitTree",
    "SuppliedNodes",
    "TransshipmentNetwork",
    "WSPairList",
    "approx_w1",
    "assemble",
    "build_network",
    "build_split_tree",
    "build_wspd",
    "compute_delta",
    "count_pairs",
    "delta_condense",
    "diagonal_distance",
    "diagonal_projection",
    "emit_arcs",
    "exact_w1_bruteforce",
    "exact_w1_dense",
    "find_entering_arc",
    "load_diagram",
    "nn_search",
    "parse_diagram",
    "rwmd",
    "s_from_error",
    "serialize_diagram",
    "snap_point",
    "solve",
    "total_error_factor",
    "wcd",
    "well_separated",
    "write_pairs",
    "zero_condense",
]
