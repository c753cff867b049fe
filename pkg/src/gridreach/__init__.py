"""Small-space directed reachability on grid graphs."""

from .aux import (
    AuxContext,
    AuxEdge,
    AuxSubgraph,
    Block,
    Decomposition,
    OracleBackend,
    aux_edge_exists,
    ccw_index,
    ccw_next,
    closer,
    crosses,
    decomposition_side,
)
from .engine import (
    Engine,
    EngineConfig,
    RecursionDepthError,
    VisitedTable,
    aux_reach,
    component_of,
    grid_reach,
    grid_reach_many,
    implicit_aux_reach,
    is_marked,
)
from .grid import (
    GridError,
    GridGraph,
    GridParseError,
    GridView,
    SubgridRef,
    VertexId,
    generate_random,
    oracle_reach,
    parse_grid,
    read_grid,
    serialize_grid,
    subgrid_view,
)
from .instrument import Metrics, ScalingFit, Workspace, fit_scaling
from .pseudosep import (
    PlanarSkeleton,
    Pseudoseparator,
    StripComponents,
    build_pseudoseparator,
    components,
    max_noncrossing_subgraph,
    planar_separator,
    strip,
    triangulate,
    verify_pseudoseparator,
)

__all__ = [
    "Metrics",
    "ScalingFit",
    "Workspace",
    "fit_scaling",
    "AuxContext",
    "AuxEdge",
    "AuxSubgraph",
    "Block",
    "Decomposition",
    "Engine",
    "EngineConfig",
    "GridError",
    "GridGraph",
    "GridParseError",
    "GridView",
    "OracleBackend",
    "PlanarSkeleton",
    "Pseudoseparator",
    "RecursionDepthError",
    "StripComponents",
    "SubgridRef",
    "VertexId",
    "VisitedTable",
    "aux_edge_exists",
    "aux_reach",
    "build_pseudoseparator",
    "ccw_index",
    "ccw_next",
    "closer",
    "component_of",
    "components",
    "crosses",
    "decomposition_side",
    "generate_random",
    "grid_reach",
    "grid_reach_many",
    "implicit_aux_reach",
    "is_marked",
    "max_noncrossing_subgraph",
    "oracle_reach",
    "parse_grid",
    "planar_separator",
    "read_grid",
    "serialize_grid",
    "strip",
    "subgrid_view",
    "triangulate",
    "verify_pseudoseparator",
]
