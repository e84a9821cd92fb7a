"""Weighted undirected graphs with dense integer node ids.

Edges are stored once, canonically as ``u <= v``.  A self-loop of weight
``w`` contributes ``2w`` to its node's weighted degree and ``w`` to the total
weight ``m``; with this convention the modularity of an aggregated graph
equals the modularity of the partition it was built from.
"""
from __future__ import annotations

import io
import os
from typing import Iterable, Sequence, TextIO

import numpy as np


class GraphError(ValueError):
    """Invalid graph construction or query."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Graph:
    """Immutable undirected weighted graph.

    Parallel edges (including reversed duplicates) are merged by summing
    their weights.  ``labels`` optionally maps dense ids back to the tokens
    they were read from.
    """

    def __init__(self, node_count: int, src, dst, weight=None, labels: Sequence[str] | None = None):
        node_count = int(node_count)
        if node_count < 0:
            raise GraphError("node_count must be non-negative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphError("src and dst must have the same length")
        if weight is None:
            weight = np.ones(src.shape[0], dtype=np.float64)
        weight = np.asarray(weight, dtype=np.float64).ravel()
        if weight.shape != src.shape:
            raise GraphError("weight must match the number of edges")
        if src.size:
            if min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= node_count:
                raise GraphError("edge endpoint out of range")
            if not np.all(np.isfinite(weight)) or np.any(weight < 0):
                raise GraphError("edge weights must be finite and non-negative")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != node_count:
                raise GraphError("labels must have one entry per node")

        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * max(node_count, 1) + hi
        uniq, inverse = np.unique(key, return_inverse=True)
        merged = np.bincount(inverse, weights=weight, minlength=uniq.size) if uniq.size else np.zeros(0)
        n = max(node_count, 1)
        self._n = node_count
        self._u = (uniq // n).astype(np.int64)
        self._v = (uniq % n).astype(np.int64)
        self._w = merged.astype(np.float64)
        self._labels = labels
        for arr in (self._u, self._v, self._w):
            arr.setflags(write=False)
        self._build_adjacency()

    def _build_adjacency(self) -> None:
        n = self._n
        loop = self._u == self._v
        # both directions for ordinary edges, a single entry for self-loops
        rows = np.concatenate([self._u, self._v[~loop]])
        cols = np.concatenate([self._v, self._u[~loop]])
        data = np.concatenate([self._w, self._w[~loop]])
        order = np.lexsort((cols, rows))
        rows, cols, data = rows[order], cols[order], data[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        self._indptr, self._indices, self._data = indptr, cols, data

        degree = np.bincount(self._u, weights=self._w, minlength=n) + np.bincount(
            self._v, weights=self._w, minlength=n
        )
        self._degree = degree.astype(np.float64)
        self._loop_weight = np.bincount(self._u[loop], weights=self._w[loop], minlength=n).astype(np.float64)
        for arr in (indptr, cols, data, self._degree, self._loop_weight):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple], labels: Sequence[str] | None = None) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples."""
        src, dst, wts = [], [], []
        for e in edges:
            src.append(e[0])
            dst.append(e[1])
            wts.append(e[2] if len(e) > 2 else 1.0)
        return cls(node_count, src, dst, wts, labels=labels)

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        """Number of distinct edges, self-loops included."""
        return int(self._u.size)

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def label(self, i: int) -> str:
        return self._labels[i] if self._labels is not None else str(i)

    def node_labels(self) -> list[str]:
        return [self.label(i) for i in range(self._n)]

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonical ``(u, v, w)`` arrays with ``u <= v``, sorted by ``(u, v)``."""
        return self._u, self._v, self._w

    @property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency as ``(indptr, indices, weights)``; neighbor lists are sorted."""
        return self._indptr, self._indices, self._data

    @property
    def degrees(self) -> np.ndarray:
        return self._degree

    @property
    def self_loops(self) -> np.ndarray:
        """Self-loop weight per node (zero where absent)."""
        return self._loop_weight

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        self._check_node(i)
        lo, hi = self._indptr[i], self._indptr[i + 1]
        return [(int(j), float(w)) for j, w in zip(self._indices[lo:hi], self._data[lo:hi])]

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = self._indptr[u], self._indptr[u + 1]
        pos = lo + np.searchsorted(self._indices[lo:hi], v)
        return bool(pos < hi and self._indices[pos] == v)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self._u.tolist(), self._v.tolist()))

    def non_loop_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        keep = self._u != self._v
        return self._u[keep], self._v[keep], self._w[keep]

    def transition_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Adjacency with self-loops removed, as used by random walks."""
        rows = np.repeat(np.arange(self._n), np.diff(self._indptr))
        keep = self._indices != rows
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows[keep], minlength=self._n), out=indptr[1:])
        return indptr, self._indices[keep].copy(), self._data[keep].copy()

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise GraphError(f"node id {i} out of range [0, {self._n})")

    def __repr__(self) -> str:
        return f"Graph(node_count={self._n}, edge_count={self.edge_count})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._u, other._u)
            and np.array_equal(self._v, other._v)
            and np.array_equal(self._w, other._w)
        )

    __hash__ = None


def weighted_degree(g: Graph, i: int) -> float:
    """Sum of incident edge weights; self-loops count twice."""
    g._check_node(i)
    return float(g.degrees[i])


def total_weight(g: Graph) -> float:
    """Total edge weight ``m`` (half the degree sum)."""
    m = float(g.edges[2].sum())
    if not m > 0:
        raise GraphError("graph has zero total weight")
    return m


def _open_text(source) -> tuple[TextIO, bool]:
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source, False
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, str):
        return io.StringIO(source), False
    raise GraphError(f"cannot read edge list from {source!r}")


def load_edge_list(source, default_weight: float = 1.0, nodes: Sequence[str] | None = None) -> Graph:
    """Parse a whitespace-separated ``u v [w]`` edge list.

    ``source`` is a path, a file object or the text itself.  Tokens are mapped
    to dense ids in order of first appearance, unless ``nodes`` fixes the
    mapping up front (then unknown tokens are an error and nodes without
    edges are kept).
    """
    fh, close = _open_text(source)
    if nodes is not None:
        ids = {str(t): i for i, t in enumerate(nodes)}
        if len(ids) != len(nodes):
            raise GraphError("duplicate node labels")
    else:
        ids = {}
    src, dst, wts = [], [], []
    try:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(parts)}")
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise EdgeListParseError(lineno, f"non-numeric weight {parts[2]!r}") from None
                if not np.isfinite(w) or w < 0:
                    raise EdgeListParseError(lineno, f"invalid weight {parts[2]!r}")
            else:
                w = default_weight
            pair = []
            for tok in parts[:2]:
                if tok not in ids:
                    if nodes is not None:
                        raise EdgeListParseError(lineno, f"unknown node {tok!r}")
                    ids[tok] = len(ids)
                pair.append(ids[tok])
            src.append(pair[0])
            dst.append(pair[1])
            wts.append(w)
    finally:
        if close:
            fh.close()
    if not src and nodes is None:
        raise GraphError("edge list is empty")
    labels = list(nodes) if nodes is not None else list(ids)
    return Graph(len(labels), src, dst, wts, labels=labels)


def format_weight(w: float) -> str:
    return f"{float(w):.17g}"


def write_edge_list(g: Graph, dest) -> None:
    """Write ``label label weight`` lines; readable by :func:`load_edge_list`."""
    u, v, w = g.edges
    lines = [f"# nodes {g.node_count} edges {g.edge_count}"]
    lines += [f"{g.label(a)} {g.label(b)} {format_weight(x)}" for a, b, x in zip(u.tolist(), v.tolist(), w.tolist())]
    _write_lines(dest, lines)


def write_dot(g: Graph, dest, name: str = "G") -> None:
    """Emit Graphviz DOT, one ``--`` edge per line with the weight as attribute."""
    u, v, w = g.edges
    lines = [f"graph {name} {{"]
    lines += [f'  "{g.label(i)}";' for i in range(g.node_count)]
    lines += [
        f'  "{g.label(a)}" -- "{g.label(b)}" [weight={format_weight(x)}];'
        for a, b, x in zip(u.tolist(), v.tolist(), w.tolist())
    ]
    lines.append("}")
    _write_lines(dest, lines)


def _write_lines(dest, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
