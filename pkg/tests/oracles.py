"""Brute-force reference computations, kept independent of the package code."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def set_partitions(items):
    """Yield every partition of ``items`` as a list of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def blocks_to_assignment(blocks, n):
    a = [0] * n
    for c, block in enumerate(blocks):
        for x in block:
            a[x] = c
    return a


def adjacency(n, edges):
    """Dense adjacency with self-loops on the diagonal as ``2w``."""
    A = [[Fraction(0)] * n for _ in range(n)]
    for e in edges:
        u, v = e[0], e[1]
        w = Fraction(e[2]) if len(e) > 2 else Fraction(1)
        if u == v:
            A[u][u] += 2 * w
        else:
            A[u][v] += w
            A[v][u] += w
    return A


def modularity_exact(n, edges, assignment) -> Fraction:
    """Pairwise modularity sum in exact rational arithmetic."""
    A = adjacency(n, edges)
    k = [sum(row) for row in A]
    two_m = sum(k)
    q = Fraction(0)
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += A[i][j] - k[i] * k[j] / two_m
    return q / two_m


def best_partition(n, edges):
    best, arg = None, None
    count = 0
    for blocks in set_partitions(range(n)):
        count += 1
        q = modularity_exact(n, edges, blocks_to_assignment(blocks, n))
        if best is None or q > best:
            best, arg = q, blocks
    return best, arg, count


def same_partition(a, b) -> bool:
    a, b = list(a), list(b)
    return len(a) == len(b) and all(
        (a[i] == a[j]) == (b[i] == b[j]) for i in range(len(a)) for j in range(len(a))
    )


def auc_pairs(pos, neg) -> float:
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def rank_sum_exact_p(a, b) -> float:
    """Two-sided permutation p-value of the U statistic.

    Every way of labelling ``len(a)`` of the pooled values as sample one is
    equally likely under the null; U is computed by direct pair counting.
    """
    pooled = list(a) + list(b)
    n1 = len(a)

    def u_of(x, y):
        return sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in x for q in y)

    mean = n1 * len(b) / 2.0
    obs = abs(u_of(a, b) - mean)
    hits = total = 0
    for labels in itertools.product((0, 1), repeat=len(pooled)):
        if sum(labels) != n1:
            continue
        x = [v for v, l in zip(pooled, labels) if l]
        y = [v for v, l in zip(pooled, labels) if not l]
        total += 1
        if abs(u_of(x, y) - mean) >= obs - 1e-9:
            hits += 1
    return hits / total


def central_difference(f, x, eps=1e-6):
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = x[idx]
        x[idx] = old + eps
        hi = f(x)
        x[idx] = old - eps
        lo = f(x)
        x[idx] = old
        grad[idx] = (hi - lo) / (2 * eps)
    return grad
