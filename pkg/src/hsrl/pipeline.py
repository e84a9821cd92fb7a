"""Compress, embed every level independently, concatenate per original node."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .learners import LearnerConfig, init_embeddings, learn_embeddings
from .louvain import Hierarchy, hierarchical_sampling

log = logging.getLogger(__name__)


@dataclass
class HsrlResult:
    final: np.ndarray
    per_level: list[np.ndarray]
    hierarchy: Hierarchy
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def dim_per_level(self) -> int:
        return self.per_level[0].shape[1]


def membership_chain(h: Hierarchy, i: int, k: int) -> int:
    """Id of the level-``k`` node that original node ``i`` was merged into."""
    if not 0 <= k <= h.achieved_levels:
        raise IndexError(f"level {k} outside 0..{h.achieved_levels}")
    if not 0 <= i < h.graphs[0].node_count:
        raise IndexError(f"node {i} out of range")
    for level in range(k):
        i = int(h.memberships[level][i])
    return i


def chain_matrix(h: Hierarchy) -> np.ndarray:
    """``(n0, K+1)`` array whose column ``k`` holds every node's level-``k`` id."""
    n0 = h.graphs[0].node_count
    cols = [np.arange(n0, dtype=np.int64)]
    for m in h.memberships:
        cols.append(np.asarray(m)[cols[-1]])
    return np.stack(cols, axis=1)


def concatenate_levels(h: Hierarchy, per_level: list[np.ndarray]) -> np.ndarray:
    """Row ``i`` is ``[Z0[c_i^0], Z1[c_i^1], ..., ZK[c_i^K]]``."""
    if len(per_level) != h.achieved_levels + 1:
        raise ValueError("need one embedding matrix per hierarchy level")
    chain = chain_matrix(h)
    for k, (Z, level) in enumerate(zip(per_level, h.graphs)):
        if Z.shape[0] != level.node_count:
            raise ValueError(f"level {k}: {Z.shape[0]} rows for {level.node_count} nodes")
    return np.hstack([Z[chain[:, k]] for k, Z in enumerate(per_level)])


def _has_trainable_edges(g: Graph) -> bool:
    u, v, w = g.non_loop_edges()
    return bool(np.any(w > 0))


def embed_level(g: Graph, cfg: LearnerConfig, learner: str, backend: str | None = None) -> np.ndarray:
    # a level made only of self-loops has nothing to train on for LINE
    if learner == "line" and not _has_trainable_edges(g):
        return init_embeddings(g.node_count, cfg.dim, cfg.seed)
    return learn_embeddings(g, cfg, learner, backend)


def run_hsrl(
    g: Graph,
    levels: int,
    cfg: LearnerConfig,
    learner: str = "deepwalk",
    backend: str | None = None,
    workers: int = 1,
    hierarchy: Hierarchy | None = None,
) -> HsrlResult:
    """Hierarchical sampling, per-level learning with seeds ``seed + k``, concatenation.

    Levels are trained independently (no warm start from coarser levels), so
    ``workers > 1`` trains them on a thread pool.  Final width is
    ``(achieved_levels + 1) * dim``.
    """
    timings = {}
    t0 = time.perf_counter()
    if hierarchy is None:
        hierarchy = hierarchical_sampling(g, levels, seed=cfg.seed)
    elif hierarchy.graphs[0].node_count != g.node_count:
        raise ValueError("hierarchy does not belong to this graph")
    timings["compress"] = time.perf_counter() - t0
    log.info("hierarchy node counts %s", hierarchy.node_counts())

    t0 = time.perf_counter()
    jobs = [(level, cfg.replace(seed=cfg.seed + k)) for k, level in enumerate(hierarchy.graphs)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_level = list(pool.map(lambda job: embed_level(job[0], job[1], learner, backend), jobs))
    else:
        per_level = [embed_level(level, c, learner, backend) for level, c in jobs]
    timings["train"] = time.perf_counter() - t0

    final = concatenate_levels(hierarchy, per_level)
    return HsrlResult(final, per_level, hierarchy, timings)
