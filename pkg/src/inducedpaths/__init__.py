"""Long induced paths by a modified depth-first search."""

from .dfs import (
    DfsState,
    RunRecord,
    Step,
    VertexOrdering,
    audit_invariants,
    dfs_init,
    dfs_round,
    dfs_run,
    stop_when,
)
from .graph import (
    Graph,
    GraphError,
    VertexSet,
    excess,
    induced_subgraph,
    is_path_in_gprime_induced_in_g,
    load_graph,
    parse_edge_list,
    prune_min_degree,
)
from .sources import BernoulliStream, FixedSource, GenerativeSource, QuerySource, sample_gnp

__version__ = "0.1.0"

__all__ = [
    "BernoulliStream", "DfsState", "FixedSource", "GenerativeSource", "Graph", "GraphError", "QuerySource", "RunRecord",
    "Step", "VertexOrdering", "VertexSet", "audit_invariants", "dfs_init", "dfs_round", "dfs_run", "excess",
    "induced_subgraph", "is_path_in_gprime_induced_in_g", "load_graph", "parse_edge_list", "prune_min_degree",
    "sample_gnp", "stop_when",
]
