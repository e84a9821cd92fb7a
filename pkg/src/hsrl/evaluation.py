"""Link-prediction protocol: edge splits, negatives, cosine scoring, AUC,
rank-sum significance, compression reports and one-parameter sweeps."""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import comb
from scipy.stats import norm, rankdata

from .graph import Graph, GraphError
from .learners import LearnerConfig
from .louvain import Hierarchy
from .pipeline import run_hsrl

SIGNIFICANCE_LEVEL = 0.05
EXACT_RANK_SUM_LIMIT = 20000
BASELINE_NAMES = {"deepwalk": "DeepWalk", "node2vec": "node2vec", "line": "LINE"}
SHORT_NAMES = {"deepwalk": "DW", "node2vec": "N2V", "line": "LINE"}
ASSUMPTIONS = (
    "negatives: uniform non-adjacent pairs drawn against the full edge set, one per test edge",
    "nodes isolated by the split are scored like any other node",
)


@dataclass
class EdgeSplit:
    train_graph: Graph
    test_positives: np.ndarray
    seed: int
    ratio: float


def split_edges(g: Graph, ratio: float = 0.8, seed: int = 0) -> EdgeSplit:
    """Hold out ``round((1 - ratio) * |E|)`` uniformly chosen edges for testing."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    u, v, w = g.edges
    n_edges = u.size
    n_test = int(round((1.0 - ratio) * n_edges))
    perm = np.random.default_rng(seed).permutation(n_edges)
    test, train = perm[:n_test], np.sort(perm[n_test:])
    train_graph = Graph(g.node_count, u[train], v[train], w[train], labels=g.labels)
    return EdgeSplit(train_graph, np.stack([u[test], v[test]], axis=1), seed, ratio)


def sample_negative_pairs(g: Graph, n: int, seed: int = 0) -> np.ndarray:
    """``n`` distinct non-adjacent pairs ``(u, v)``, ``u < v``, drawn uniformly."""
    N = g.node_count
    existing = {(a, b) for a, b in g.edge_set() if a != b}
    available = N * (N - 1) // 2 - len(existing)
    if n > available:
        raise GraphError(f"requested {n} negative pairs, only {available} non-edges exist")
    rng = np.random.default_rng(seed)
    if n > available // 2:
        candidates = [
            (a, b) for a in range(N) for b in range(a + 1, N) if (a, b) not in existing
        ]
        pick = rng.choice(len(candidates), size=n, replace=False)
        return np.asarray([candidates[i] for i in pick], dtype=np.int64).reshape(n, 2)
    chosen: dict[tuple[int, int], None] = {}
    while len(chosen) < n:
        draws = rng.integers(0, N, size=(2 * (n - len(chosen)) + 8, 2))
        for a, b in draws.tolist():
            if a == b:
                continue
            pair = (a, b) if a < b else (b, a)
            if pair in existing or pair in chosen:
                continue
            chosen[pair] = None
            if len(chosen) == n:
                break
    return np.asarray(list(chosen), dtype=np.int64).reshape(n, 2)


def cosine_score(Z: np.ndarray, u: int, v: int) -> float:
    """Cosine similarity of rows ``u`` and ``v``; zero-norm rows score 0."""
    n = Z.shape[0]
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError("node id out of range")
    return float(cosine_scores(Z, np.array([[u, v]]))[0])


def cosine_scores(Z: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    a, b = Z[pairs[:, 0]], Z[pairs[:, 1]]
    num = np.einsum("ij,ij->i", a, b)
    den = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    out = np.zeros(len(pairs))
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def auc(pos_scores: Sequence[float], neg_scores: Sequence[float]) -> float:
    """P(random positive outscores random negative), ties counted half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("auc needs non-empty positive and negative scores")
    ranks = rankdata(np.concatenate([pos, neg]))
    n_pos, n_neg = pos.size, neg.size
    return float((ranks[:n_pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


class RankSumResult(NamedTuple):
    statistic: float
    pvalue: float
    degenerate: bool
    method: str


def rank_sum_test(a: Sequence[float], b: Sequence[float]) -> RankSumResult:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test.

    ``statistic`` is U for ``a``.  Small samples use the exact permutation
    distribution of the midranks; larger ones the normal approximation with
    tie and continuity corrections.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise ValueError("rank_sum_test needs at least two values per sample")
    n1, n2 = x.size, y.size
    n = n1 + n2
    ranks = rankdata(np.concatenate([x, y]))
    u_stat = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    mean_u = n1 * n2 / 2.0
    if np.ptp(ranks) == 0:
        return RankSumResult(u_stat, 1.0, True, "degenerate")

    if comb(n, n1, exact=True) <= EXACT_RANK_SUM_LIMIT:
        observed = abs(u_stat - mean_u)
        extreme = total = 0
        offset = n1 * (n1 + 1) / 2.0
        for idx in itertools.combinations(range(n), n1):
            u = ranks[list(idx)].sum() - offset
            total += 1
            if abs(u - mean_u) >= observed - 1e-9:
                extreme += 1
        return RankSumResult(u_stat, min(1.0, extreme / total), False, "exact")

    _, counts = np.unique(ranks, return_counts=True)
    tie_term = float((counts**3 - counts).sum()) / (n * (n - 1))
    sigma = math.sqrt(n1 * n2 / 12.0 * ((n + 1) - tie_term))
    z = max(abs(u_stat - mean_u) - 0.5, 0.0) / sigma
    return RankSumResult(u_stat, min(1.0, 2.0 * float(norm.sf(z))), False, "normal")


class LevelCompression(NamedTuple):
    level: int
    nodes: int
    edges: int
    node_ratio: float
    edge_ratio: float


def compression_report(h: Hierarchy) -> list[LevelCompression]:
    """Node and edge counts of every level relative to level 0 (self-loops are edges)."""
    if not h.graphs:
        raise ValueError("empty hierarchy")
    n0, e0 = h.graphs[0].node_count, h.graphs[0].edge_count
    return [
        LevelCompression(
            k, g.node_count, g.edge_count,
            g.node_count / n0 if n0 else 1.0,
            g.edge_count / e0 if e0 else 1.0,
        )
        for k, g in enumerate(h.graphs)
    ]


def write_compression_report(rows: list[LevelCompression], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("level\tnodes\tedges\tnode_ratio\tedge_ratio\n")
        for r in rows:
            fh.write(f"{r.level}\t{r.nodes}\t{r.edges}\t{r.node_ratio:.6f}\t{r.edge_ratio:.6f}\n")


@dataclass
class EvalReport:
    dataset: str
    learner: str
    seeds: list[int]
    aucs: dict[str, list[float]]
    hsrl_method: str
    significance: dict[str, RankSumResult] = field(default_factory=dict)
    compression: list[list[LevelCompression]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def mean(self, method: str) -> float:
        return float(np.mean(self.aucs[method]))

    def significantly_better(self) -> bool:
        """HSRL beats every other method at the 0.05 level."""
        others = [m for m in self.aucs if m != self.hsrl_method]
        return bool(others) and all(
            self.significance[m].pvalue < SIGNIFICANCE_LEVEL and self.mean(self.hsrl_method) > self.mean(m)
            for m in others
        )


def _evaluate_rep(args) -> dict:
    g, learner, cfg, levels, ratio, seed, backend = args
    timings = {}
    t0 = time.perf_counter()
    split = split_edges(g, ratio, seed)
    negatives = sample_negative_pairs(g, len(split.test_positives), seed=seed + 7919)
    timings["split"] = time.perf_counter() - t0

    result = run_hsrl(split.train_graph, levels, cfg.replace(seed=seed), learner, backend=backend)
    timings.update(result.timings)

    t0 = time.perf_counter()
    aucs = {}
    # level 0 of the hierarchy is the plain learner on the training graph with the same seed
    for name, Z in (("hsrl", result.final), ("baseline", result.per_level[0])):
        aucs[name] = auc(cosine_scores(Z, split.test_positives), cosine_scores(Z, negatives))
    timings["score"] = time.perf_counter() - t0
    return {"seed": seed, "aucs": aucs, "compression": compression_report(result.hierarchy), "timings": timings}


def evaluate_link_prediction(
    g: Graph,
    learner: str = "deepwalk",
    cfg: LearnerConfig | None = None,
    levels: int = 3,
    ratio: float = 0.8,
    reps: int = 20,
    seeds: Sequence[int] | None = None,
    dataset: str = "graph",
    backend: str | None = None,
    workers: int = 1,
) -> EvalReport:
    """Repeated split / train / score runs comparing HSRL with its base learner."""
    cfg = cfg or LearnerConfig()
    seeds = list(seeds) if seeds is not None else list(range(reps))
    jobs = [(g, learner, cfg, levels, ratio, s, backend) for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_evaluate_rep, jobs))
    else:
        runs = [_evaluate_rep(job) for job in jobs]

    hsrl_name = f"HSRL({SHORT_NAMES[learner]})"
    base_name = BASELINE_NAMES[learner]
    aucs = {base_name: [r["aucs"]["baseline"] for r in runs], hsrl_name: [r["aucs"]["hsrl"] for r in runs]}
    timings: dict[str, float] = {}
    for r in runs:
        for k, v in r["timings"].items():
            timings[k] = timings.get(k, 0.0) + v
    report = EvalReport(dataset, learner, seeds, aucs, hsrl_name,
                        compression=[r["compression"] for r in runs], timings=timings)
    if len(seeds) >= 2:
        report.significance[base_name] = rank_sum_test(aucs[hsrl_name], aucs[base_name])
    return report


def format_table(reports: Sequence[EvalReport]) -> str:
    """Plain-text table: rows are methods, columns datasets, cells mean AUC.

    A dagger marks HSRL when it is significantly better than the other rows
    for that learner.
    """
    datasets = list(dict.fromkeys(r.dataset for r in reports))
    learners = list(dict.fromkeys(r.learner for r in reports))
    lookup = {(r.dataset, r.learner): r for r in reports}
    width = max(12, *(len(d) + 2 for d in datasets))
    lines = ["# " + a for a in ASSUMPTIONS]
    lines.append(f"{'Algorithm':<18}" + "".join(f"{d:>{width}}" for d in datasets))
    for learner in learners:
        base, hsrl = BASELINE_NAMES[learner], f"HSRL({SHORT_NAMES[learner]})"
        for method in (base, hsrl):
            cells = []
            for d in datasets:
                r = lookup.get((d, learner))
                if r is None:
                    cells.append("-")
                    continue
                mark = "\u2020" if method == hsrl and r.significantly_better() else ""
                cells.append(f"{r.mean(method):.3f}{mark}")
            lines.append(f"{method:<18}" + "".join(f"{c:>{width}}" for c in cells))
        gains = []
        for d in datasets:
            r = lookup.get((d, learner))
            gains.append("-" if r is None else f"{100.0 * (r.mean(hsrl) - r.mean(base)) / r.mean(base):.1f}")
        lines.append(f"{'Gain of HSRL(%)':<18}" + "".join(f"{c:>{width}}" for c in gains))
    lines.append(f"\u2020 significantly better (two-sided Wilcoxon rank-sum, p < {SIGNIFICANCE_LEVEL})")
    return "\n".join(lines) + "\n"


def write_report_tsv(reports: Sequence[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dataset\tmethod\trep\tseed\tauc\n")
        for r in reports:
            for method, values in r.aucs.items():
                for rep, (seed, value) in enumerate(zip(r.seeds, values)):
                    fh.write(f"{r.dataset}\t{method}\t{rep}\t{seed}\t{value:.6f}\n")


def write_significance_tsv(reports: Sequence[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dataset\tmethod\tversus\tmean\tversus_mean\tU\tp_value\tmethod_used\tdegenerate\n")
        for r in reports:
            for other, res in r.significance.items():
                fh.write(
                    f"{r.dataset}\t{r.hsrl_method}\t{other}\t{r.mean(r.hsrl_method):.6f}\t{r.mean(other):.6f}"
                    f"\t{res.statistic:.1f}\t{res.pvalue:.6g}\t{res.method}\t{int(res.degenerate)}\n"
                )


SWEEP_PARAMETERS = ("dim", "levels")


def sweep(
    g: Graph,
    parameter: str,
    values: Sequence,
    learner: str = "deepwalk",
    cfg: LearnerConfig | None = None,
    levels: int = 3,
    ratio: float = 0.8,
    reps: int = 5,
    backend: str | None = None,
    workers: int = 1,
) -> list[tuple[object, list[float]]]:
    """HSRL AUC as a function of one parameter with all others held fixed."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"can only sweep {SWEEP_PARAMETERS}")
    cfg = cfg or LearnerConfig()
    rows = []
    for value in values:
        run_cfg, run_levels = cfg, levels
        if parameter == "dim":
            run_cfg = cfg.replace(dim=int(value))
        else:
            run_levels = int(value)
        report = evaluate_link_prediction(
            g, learner, run_cfg, run_levels, ratio, reps, backend=backend, workers=workers
        )
        rows.append((value, report.aucs[report.hsrl_method]))
    return rows


def write_sweep_tsv(parameter: str, rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{parameter}\tmean_auc\tstd_auc\taucs\n")
        for value, aucs in rows:
            fh.write(
                f"{value}\t{np.mean(aucs):.6f}\t{np.std(aucs):.6f}\t" + ",".join(f"{a:.6f}" for a in aucs) + "\n"
            )
