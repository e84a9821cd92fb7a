"""Node embeddings from a hierarchy of community-compressed graphs.

A graph is repeatedly compressed by modularity-based community detection,
an off-the-shelf embedding learner is trained on every level, and each
original node is represented by the concatenation of the embeddings of the
communities that contain it.
"""
from .graph import Graph, load_edge_list, total_weight, weighted_degree
from .learners import LearnerConfig, learn_embeddings
from .louvain import Hierarchy, Partition, hierarchical_sampling, modularity, modularity_optimization, node_aggregation
from .pipeline import HsrlResult, membership_chain, run_hsrl

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Hierarchy",
    "HsrlResult",
    "LearnerConfig",
    "Partition",
    "hierarchical_sampling",
    "learn_embeddings",
    "load_edge_list",
    "membership_chain",
    "modularity",
    "modularity_optimization",
    "node_aggregation",
    "run_hsrl",
    "total_weight",
    "weighted_degree",
]
