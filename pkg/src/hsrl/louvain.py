"""Modularity, Louvain-style local moving and node aggregation.

``hierarchical_sampling`` applies one local-moving pass followed by one
aggregation per level and stops as soon as a level fails to shrink the
graph.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import Graph, GraphError, load_edge_list, total_weight, write_edge_list

CONVERGENCE_THRESHOLD = 1e-7


class Partition:
    """Node to community assignment with cached per-community aggregates.

    ``community_internal_weight`` holds the weight of edges with both ends inside a community
    (self-loops once), ``community_total_degree`` the sum of member degrees.
    """

    def __init__(self, g: Graph, assignment):
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.shape != (g.node_count,):
            raise GraphError(
                f"partition covers {assignment.size} nodes, graph has {g.node_count}"
            )
        if assignment.size and assignment.min() < 0:
            raise GraphError("community ids must be non-negative")
        self.assignment = assignment.copy()
        n_comm = int(assignment.max()) + 1 if assignment.size else 0
        self.community_total_degree = np.bincount(assignment, weights=g.degrees, minlength=n_comm).astype(np.float64)
        u, v, w = g.edges
        same = assignment[u] == assignment[v]
        self.community_internal_weight = np.bincount(assignment[u][same], weights=w[same], minlength=n_comm).astype(np.float64)

    @classmethod
    def singletons(cls, g: Graph) -> "Partition":
        return cls(g, np.arange(g.node_count))

    @property
    def community_count(self) -> int:
        return int(np.count_nonzero(np.bincount(self.assignment))) if self.assignment.size else 0

    def densified(self) -> np.ndarray:
        """Assignment relabelled to ``0..C-1`` in order of first appearance."""
        _, first, inverse = np.unique(self.assignment, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return rank[inverse.ravel()]

    def members(self) -> list[np.ndarray]:
        dense = self.densified()
        order = np.argsort(dense, kind="stable")
        bounds = np.cumsum(np.bincount(dense))[:-1]
        return np.split(order, bounds)


def modularity(g: Graph, p: Partition) -> float:
    """Newman modularity of ``p`` on ``g``.

    Uses the per-community form ``sum_c internal_c/m - (tot_c/2m)^2``, which
    equals the pairwise double sum when self-loops enter the adjacency
    diagonal as ``2w``.
    """
    if p.assignment.size != g.node_count:
        raise GraphError("partition and graph sizes differ")
    m = total_weight(g)
    tot = p.community_total_degree / (2.0 * m)
    return float(p.community_internal_weight.sum() / m - np.dot(tot, tot))


def modularity_bruteforce(g: Graph, assignment) -> float:
    """Direct O(n^2) evaluation of the pairwise modularity sum."""
    n = g.node_count
    a = np.zeros((n, n))
    u, v, w = g.edges
    for x, y, z in zip(u, v, w):
        if x == y:
            a[x, x] += 2 * z
        else:
            a[x, y] += z
            a[y, x] += z
    k = a.sum(axis=1)
    two_m = k.sum()
    c = np.asarray(assignment)
    delta = c[:, None] == c[None, :]
    return float(((a - np.outer(k, k) / two_m) * delta).sum() / two_m)


MoveCallback = Callable[[int, int, int, float, Partition], None]


def modularity_optimization(
    g: Graph,
    seed: int = 0,
    threshold: float = CONVERGENCE_THRESHOLD,
    on_move: MoveCallback | None = None,
) -> Partition:
    """Greedy local moving from singleton communities.

    Each sweep visits nodes in a fresh seeded random order and moves a node
    to the adjacent community with the largest strictly positive gain (ties
    go to the lowest community id).  Sweeps stop once a whole sweep gains
    less than ``threshold``.  ``on_move(node, old, new, gain, partition)``
    is called after every accepted move.
    """
    m = total_weight(g)
    n = g.node_count
    rng = np.random.default_rng(seed)
    indptr, indices, weights = g.csr
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    weights_l = weights.tolist()
    degree = g.degrees.tolist()
    loops = g.self_loops.tolist()

    part = Partition.singletons(g)
    comm = part.assignment.tolist()
    tot = part.community_total_degree.tolist()
    internal = part.community_internal_weight.tolist()
    two_m2 = 2.0 * m * m

    while True:
        sweep_gain = 0.0
        for i in rng.permutation(n).tolist():
            ci = comm[i]
            ki = degree[i]
            links: dict[int, float] = {}
            for pos in range(indptr_l[i], indptr_l[i + 1]):
                j = indices_l[pos]
                if j != i:
                    cj = comm[j]
                    links[cj] = links.get(cj, 0.0) + weights_l[pos]
            if not links:
                continue
            k_own = links.get(ci, 0.0)
            tot_own = tot[ci] - ki
            stay = k_own / m - tot_own * ki / two_m2
            best, best_gain = ci, stay
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] / m - tot[c] * ki / two_m2
                if gain > best_gain:
                    best, best_gain = c, gain
            if best == ci:
                continue
            delta = best_gain - stay
            tot[ci] -= ki
            internal[ci] -= k_own + loops[i]
            tot[best] += ki
            internal[best] += links[best] + loops[i]
            comm[i] = best
            sweep_gain += delta
            if on_move is not None:
                part.assignment[:] = comm
                part.community_total_degree[:] = tot
                part.community_internal_weight[:] = internal
                on_move(i, ci, best, delta, part)
        if sweep_gain < threshold:
            break

    return Partition(g, Partition(g, np.asarray(comm)).densified())


def node_aggregation(g: Graph, p: Partition) -> tuple[Graph, np.ndarray]:
    """Collapse each community of ``p`` into a single node.

    Crossing weights are summed into edges between community nodes and
    intra-community weight (including member self-loops) becomes a self-loop.
    Returns the new graph and the node -> community-node map.
    """
    if p.assignment.size != g.node_count:
        raise GraphError("partition and graph sizes differ")
    membership = p.densified()
    n_comm = int(membership.max()) + 1 if membership.size else 0
    u, v, w = g.edges
    agg = Graph(n_comm, membership[u], membership[v], w)
    return agg, membership


@dataclass
class Hierarchy:
    """Compressed graphs ``graphs[0..K]`` and the maps linking consecutive levels."""

    graphs: list[Graph]
    memberships: list[np.ndarray] = field(default_factory=list)

    @property
    def achieved_levels(self) -> int:
        return len(self.graphs) - 1

    def node_counts(self) -> list[int]:
        return [h.node_count for h in self.graphs]

    def edge_counts(self) -> list[int]:
        return [h.edge_count for h in self.graphs]


def hierarchical_sampling(g: Graph, levels: int, seed: int = 0) -> Hierarchy:
    """Recursively compress ``g`` into at most ``levels`` coarser graphs."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    hier = Hierarchy([g])
    current = g
    for k in range(levels):
        if current.edge_count == 0 or current.edges[2].sum() <= 0:
            break
        part = modularity_optimization(current, seed=seed + k)
        nxt, membership = node_aggregation(current, part)
        if nxt.node_count == current.node_count:
            break
        hier.graphs.append(nxt)
        hier.memberships.append(membership)
        current = nxt
    return hier


def save_hierarchy(h: Hierarchy, directory: str, write_dot: bool = False) -> list[str]:
    """Write ``level{k}.edges`` and ``membership{k}.tsv`` files; returns the paths."""
    from .graph import write_dot as _write_dot

    os.makedirs(directory, exist_ok=True)
    paths = []
    for k, level in enumerate(h.graphs):
        labels = level.node_labels()
        path = os.path.join(directory, f"level{k}.edges")
        write_edge_list(_relabelled(level, labels), path)
        paths.append(path)
        if write_dot:
            dot = os.path.join(directory, f"level{k}.dot")
            _write_dot(_relabelled(level, labels), dot, name=f"level{k}")
            paths.append(dot)
        if k < len(h.memberships):
            mpath = os.path.join(directory, f"membership{k}.tsv")
            with open(mpath, "w", encoding="utf-8") as fh:
                fh.write("# node_id community_id\n")
                for node, comm in zip(labels, h.memberships[k].tolist()):
                    fh.write(f"{node}\t{comm}\n")
            paths.append(mpath)
    return paths


def _relabelled(level: Graph, labels: Sequence[str]) -> Graph:
    u, v, w = level.edges
    return Graph(level.node_count, u, v, w, labels=labels)


def _read_membership(path: str) -> tuple[list[str], np.ndarray]:
    nodes, comms = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            nodes.append(a)
            comms.append(int(b))
    return nodes, np.asarray(comms, dtype=np.int64)


def load_hierarchy(directory: str) -> Hierarchy:
    """Inverse of :func:`save_hierarchy`."""
    graphs, memberships = [], []
    k = 0
    next_nodes: list[str] | None = None
    while os.path.exists(os.path.join(directory, f"level{k}.edges")):
        mpath = os.path.join(directory, f"membership{k}.tsv")
        if os.path.exists(mpath):
            nodes, comm = _read_membership(mpath)
            memberships.append(comm)
        else:
            nodes = next_nodes
        graph = load_edge_list(os.path.join(directory, f"level{k}.edges"), nodes=nodes)
        if k > 0:
            # compressed levels carry integer labels equal to their ids
            graph = Graph(graph.node_count, *graph.edges)
        graphs.append(graph)
        if memberships and len(memberships) == k + 1:
            next_nodes = [str(i) for i in range(int(memberships[-1].max()) + 1)]
        k += 1
    if not graphs:
        raise FileNotFoundError(f"no level0.edges in {directory}")
    return Hierarchy(graphs, memberships[: len(graphs) - 1])
