"""Time the compiled and pure-Python kernels on the same workload.

    python benchmarks/bench_kernels.py [--nodes 200] [--repeat 3]

Walks are bitwise identical across backends; the SGD kernels agree to
rounding, so the script also reports the largest elementwise difference.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hsrl.graph import Graph
from hsrl.kernels import BACKENDS
from hsrl.learners import LearnerConfig, generate_walks, line_fit, sgns_fit


def planted(n_blocks: int, block: int, p_in: float, p_out: float, seed: int) -> Graph:
    n = n_blocks * block
    iu, iv = np.triu_indices(n, 1)
    same = iu // block == iv // block
    keep = np.random.default_rng(seed).random(iu.size) < np.where(same, p_in, p_out)
    return Graph(n, iu[keep], iv[keep])


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200, help="graph size (rounded to blocks of 20)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = planted(max(1, args.nodes // 20), 20, 0.3, 0.01, args.seed)
    cfg = LearnerConfig(dim=32, walks_per_node=5, walk_length=40, q=2.0, line_samples=50 * g.edge_count,
                        seed=args.seed)
    corpus = generate_walks(g, cfg, "python")
    print(f"graph: {g.node_count} nodes, {g.edge_count} edges; backends: {', '.join(sorted(BACKENDS))}")

    workloads = {
        "node2vec walks": lambda b: generate_walks(g, cfg, b).walks,
        "sgns": lambda b: sgns_fit(corpus, g, cfg, b).target,
        "line (second order)": lambda b: line_fit(g, cfg, 2, cfg.dim, b).target,
    }
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in sorted(BACKENDS)) + f"{'speedup':>10}{'max diff':>12}")
    for name, fn in workloads.items():
        times, outs = {}, {}
        for b in sorted(BACKENDS):
            times[b], outs[b] = best_of(lambda: fn(b), args.repeat if b == "cython" else 1)
        row = f"{name:<22}" + "".join(f"{times[b]:>11.3f}s" for b in sorted(BACKENDS))
        if "cython" in times:
            diff = float(np.max(np.abs(outs["cython"].astype(float) - outs["python"].astype(float))))
            row += f"{times['python'] / times['cython']:>9.1f}x{diff:>12.2e}"
        print(row)


if __name__ == "__main__":
    main()
