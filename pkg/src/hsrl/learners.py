"""Pluggable node-embedding learners: DeepWalk, node2vec and LINE.

DeepWalk and node2vec share the truncated-walk corpus plus skip-gram with
negative sampling; LINE trains directly on weighted edge samples.  The
inner loops live in :mod:`hsrl.kernels`.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph, GraphError
from .kernels import get_backend
from .sampler import build_alias, build_segment_alias

LEARNERS = ("deepwalk", "node2vec", "line")
LINE_ORDERS = ("first", "second", "both")
MIN_LR_RATIO = 1e-4
NEGATIVE_POWER = 0.75

# independent kernel RNG streams per purpose
_WALK_STREAM, _SGNS_STREAM, _LINE1_STREAM, _LINE2_STREAM = range(4)


@dataclass(frozen=True)
class LearnerConfig:
    dim: int = 64
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    learning_rate: float = 0.025
    negative: int = 5
    p: float = 1.0
    q: float = 1.0
    line_order: str = "both"
    epochs: int = 1
    # LINE edge samples; None means 100 x number of edges
    line_samples: int | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "walks_per_node", "walk_length", "window", "negative", "epochs"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be > 0")
        if self.line_order not in LINE_ORDERS:
            raise ValueError(f"line_order must be one of {LINE_ORDERS}")
        if self.line_samples is not None and self.line_samples < 1:
            raise ValueError("line_samples must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def replace(self, **changes) -> "LearnerConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class WalkCorpus:
    """Walks stored as a ``-1``-padded matrix plus per-walk lengths."""

    walks: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return int(self.lengths.size)

    def __iter__(self) -> Iterator[list[int]]:
        for row, n in zip(self.walks, self.lengths):
            yield row[:n].tolist()


@dataclass
class SGNSState:
    target: np.ndarray
    context: np.ndarray
    losses: np.ndarray | None = None


def kernel_seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, stream]).generate_state(1, dtype=np.uint64)[0])


def init_embeddings(node_count: int, dim: int, seed: int) -> np.ndarray:
    """Uniform in ``[-0.5/dim, 0.5/dim]``."""
    rng = np.random.default_rng(seed)
    return (rng.random((node_count, dim)) - 0.5) / dim


def negative_weights(g: Graph) -> np.ndarray:
    """Unigram^0.75 over the walkable (self-loop free) weighted degree."""
    walk_degree = np.clip(g.degrees - 2.0 * g.self_loops, 0.0, None)
    return walk_degree ** NEGATIVE_POWER


def generate_walks(g: Graph, cfg: LearnerConfig, backend: str | None = None) -> WalkCorpus:
    """``walks_per_node`` weighted (optionally node2vec-biased) walks from every node.

    Self-loops never become transitions; a node without other neighbors
    produces a walk of length one.
    """
    if g.node_count == 0:
        raise GraphError("cannot walk an empty graph")
    indptr, indices, weights = g.transition_csr()
    keep = weights > 0
    if not keep.all():
        rows = np.repeat(np.arange(g.node_count), np.diff(indptr))[keep]
        indptr = np.zeros_like(indptr)
        np.cumsum(np.bincount(rows, minlength=g.node_count), out=indptr[1:])
        indices, weights = indices[keep], weights[keep]
    prob, alias = build_segment_alias(indptr, weights)
    walks, lengths = get_backend(backend).random_walks(
        indptr, np.ascontiguousarray(indices), prob, alias,
        cfg.walks_per_node, cfg.walk_length, float(cfg.p), float(cfg.q),
        kernel_seed(cfg.seed, _WALK_STREAM),
    )
    return WalkCorpus(walks, lengths)


def count_pairs(lengths: np.ndarray, window: int) -> int:
    """Number of (center, context) pairs produced by a full window pass."""
    total = 0
    for L, n in zip(*np.unique(np.asarray(lengths), return_counts=True)):
        i = np.arange(L)
        total += int(n) * int((np.minimum(i, window) + np.minimum(L - 1 - i, window)).sum())
    return total


def sgns_fit(
    corpus: WalkCorpus,
    g: Graph,
    cfg: LearnerConfig,
    backend: str | None = None,
    loss_buckets: int = 0,
) -> SGNSState:
    """Skip-gram with negative sampling; returns target and context matrices."""
    if len(corpus) == 0:
        raise ValueError("empty walk corpus")
    target = init_embeddings(g.node_count, cfg.dim, cfg.seed)
    context = np.zeros_like(target)
    pairs = count_pairs(corpus.lengths, cfg.window)
    if pairs == 0:
        return SGNSState(target, context, None)
    prob, alias = build_alias(negative_weights(g))
    losses = get_backend(backend).train_sgns(
        np.ascontiguousarray(corpus.walks), np.ascontiguousarray(corpus.lengths),
        target, context, cfg.window, cfg.negative, prob, alias,
        float(cfg.learning_rate), MIN_LR_RATIO, pairs * cfg.epochs, cfg.epochs,
        kernel_seed(cfg.seed, _SGNS_STREAM), loss_buckets,
    )
    return SGNSState(target, context, losses)


def train_sgns(corpus: WalkCorpus, g: Graph, cfg: LearnerConfig, backend: str | None = None) -> np.ndarray:
    return sgns_fit(corpus, g, cfg, backend=backend).target


def sgns_pair_loss(z: np.ndarray, h_pos: np.ndarray, h_neg: np.ndarray) -> float:
    """Negative log-likelihood of one positive pair and its negatives."""
    x_pos = z @ h_pos
    x_neg = h_neg @ z
    return float(np.logaddexp(0.0, -x_pos) + np.logaddexp(0.0, x_neg).sum())


def sgns_pair_grad(z: np.ndarray, h_pos: np.ndarray, h_neg: np.ndarray):
    """Analytic gradient of :func:`sgns_pair_loss` w.r.t. ``(z, h_pos, h_neg)``."""
    s_pos = 1.0 / (1.0 + np.exp(-(z @ h_pos)))
    s_neg = 1.0 / (1.0 + np.exp(-(h_neg @ z)))
    g_pos = s_pos - 1.0
    grad_z = g_pos * h_pos + s_neg @ h_neg
    return grad_z, g_pos * z, np.outer(s_neg, z)


def _line_edges(g: Graph):
    u, v, w = g.non_loop_edges()
    keep = w > 0
    u, v, w = u[keep], v[keep], w[keep]
    if u.size == 0:
        raise GraphError("LINE needs at least one positive-weight edge that is not a self-loop")
    return u, v, w


def line_fit(
    g: Graph,
    cfg: LearnerConfig,
    order: int,
    dim: int,
    backend: str | None = None,
    loss_buckets: int = 0,
) -> SGNSState:
    u, v, w = _line_edges(g)
    samples = cfg.line_samples if cfg.line_samples is not None else 100 * u.size
    edge_prob, edge_alias = build_alias(w)
    neg_prob, neg_alias = build_alias(negative_weights(g))
    stream = _LINE1_STREAM if order == 1 else _LINE2_STREAM
    target = init_embeddings(g.node_count, dim, kernel_seed(cfg.seed, stream))
    context = np.zeros_like(target)
    losses = get_backend(backend).train_line(
        u, v, edge_prob, edge_alias, target, context, order, cfg.negative,
        neg_prob, neg_alias, float(cfg.learning_rate), MIN_LR_RATIO, int(samples),
        kernel_seed(cfg.seed, stream), loss_buckets,
    )
    return SGNSState(target, context, losses)


def train_line(g: Graph, cfg: LearnerConfig, backend: str | None = None) -> np.ndarray:
    """LINE embeddings; ``both`` concatenates first- and second-order halves."""
    if cfg.line_order == "both":
        if cfg.dim % 2:
            raise ValueError("line_order='both' needs an even dimension")
        half = cfg.dim // 2
        first = line_fit(g, cfg, 1, half, backend).target
        second = line_fit(g, cfg, 2, half, backend).target
        return np.hstack([first, second])
    order = 1 if cfg.line_order == "first" else 2
    return line_fit(g, cfg, order, cfg.dim, backend).target


def learn_embeddings(g: Graph, cfg: LearnerConfig, learner: str = "deepwalk", backend: str | None = None) -> np.ndarray:
    """Dispatch to the named learner; returns a ``node_count x dim`` matrix."""
    if learner == "deepwalk":
        cfg = cfg.replace(p=1.0, q=1.0)
    elif learner == "line":
        return train_line(g, cfg, backend)
    elif learner != "node2vec":
        raise ValueError(f"unknown learner {learner!r}; choose from {LEARNERS}")
    corpus = generate_walks(g, cfg, backend)
    return train_sgns(corpus, g, cfg, backend)


def save_embeddings(Z: np.ndarray, labels: Sequence[str] | None, path) -> None:
    """Text format: ``N d`` header, then ``label f1 ... fd`` per node."""
    Z = np.asarray(Z)
    if labels is None:
        labels = [str(i) for i in range(Z.shape[0])]
    if len(labels) != Z.shape[0]:
        raise ValueError("one label per row required")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{Z.shape[0]} {Z.shape[1]}\n")
        for label, row in zip(labels, Z):
            fh.write(label + " " + " ".join(f"{x:.6g}" for x in row) + "\n")


def load_embeddings(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        n, d = (int(x) for x in fh.readline().split())
        labels, rows = [], []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise ValueError(f"expected {d + 1} fields, got {len(parts)}")
            labels.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    if len(rows) != n:
        raise ValueError(f"header announces {n} rows, found {len(rows)}")
    return labels, np.asarray(rows, dtype=np.float64).reshape(n, d)
