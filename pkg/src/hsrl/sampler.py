"""Walker/Vose alias tables for O(1) weighted draws."""
from __future__ import annotations

import numpy as np


def build_alias(weights) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(prob, alias)`` tables for a non-negative weight vector.

    Draw with: pick ``i`` uniformly, keep it with probability ``prob[i]``,
    else take ``alias[i]``.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = w.size
    if n == 0:
        raise ValueError("weights must be non-empty")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and non-negative")
    total = w.sum()
    if not total > 0:
        raise ValueError("weights sum to zero")
    scaled = w * (n / total)
    prob = np.ones(n, dtype=np.float64)
    alias = np.arange(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] -= 1.0 - scaled[s]
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    return prob, alias


def build_segment_alias(indptr, weights) -> tuple[np.ndarray, np.ndarray]:
    """Alias tables for every CSR row, with aliases stored as row-local offsets.

    Rows whose weights are all zero get ``prob = 0`` entries; callers treat
    such rows as having no transitions.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    prob = np.zeros(weights.size, dtype=np.float64)
    alias = np.zeros(weights.size, dtype=np.int64)
    for r in range(indptr.size - 1):
        lo, hi = indptr[r], indptr[r + 1]
        if hi > lo and weights[lo:hi].sum() > 0:
            prob[lo:hi], alias[lo:hi] = build_alias(weights[lo:hi])
    return prob, alias


class WeightedSampler:
    """Draws indices with probability proportional to ``weights``."""

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.prob, self.alias = build_alias(self.weights)

    def __len__(self) -> int:
        return self.prob.size

    def probabilities(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def sample(self, rng: np.random.Generator, size=None):
        idx = rng.integers(0, self.prob.size, size=size)
        keep = rng.random(size=size) < self.prob[idx]
        out = np.where(keep, idx, self.alias[idx])
        return int(out) if size is None else out
