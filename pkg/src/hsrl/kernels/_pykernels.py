"""Pure-Python fallback for the compiled kernels.

Consumes random numbers in exactly the same order as ``_ckernels`` so walks
are identical between backends.  SGD results agree to rounding (numpy dot
products sum in a different order than the compiled loops).
"""
from __future__ import annotations

import math

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        r = int(self.uniform() * n)
        return n - 1 if r >= n else r

    def alias_draw(self, lo: int, n: int, prob, alias) -> int:
        i = lo + self.below(n)
        if self.uniform() < prob[i]:
            return i - lo
        return alias[i]


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _log_sigmoid_loss(x: float, positive: bool) -> float:
    if not positive:
        x = -x
    if x >= 0:
        return math.log1p(math.exp(-x))
    return -x + math.log1p(math.exp(x))


def pair_update(Z, V, a, pos, negatives, lr, track=True) -> float:
    za = Z[a].copy()
    neu = np.zeros(Z.shape[1])
    loss = 0.0
    for s, tgt in enumerate([pos] + [int(x) for x in negatives]):
        if s > 0 and tgt == pos:
            continue
        f = float(np.dot(za, V[tgt]))
        if track:
            loss += _log_sigmoid_loss(f, s == 0)
        g = ((1.0 if s == 0 else 0.0) - _sigmoid(f)) * lr
        neu += g * V[tgt]
        V[tgt] += g * za
    Z[a] += neu
    return loss


def random_walks(indptr, indices, prob, alias, num_walks, walk_length, p, q, seed):
    n = len(indptr) - 1
    indptr_l = [int(x) for x in indptr]
    indices_l = [int(x) for x in indices]
    prob_l = [float(x) for x in prob]
    alias_l = [int(x) for x in alias]
    walks = np.full((num_walks * n, walk_length), -1, dtype=np.int64)
    lengths = np.zeros(num_walks * n, dtype=np.int64)
    rng = SplitMix64(seed)
    biased = not (p == 1.0 and q == 1.0)
    inv_p, inv_q = 1.0 / p, 1.0 / q
    max_bias = max(1.0, inv_p, inv_q)
    neighbor_sets = [set(indices_l[indptr_l[u]:indptr_l[u + 1]]) for u in range(n)] if biased else None
    order = list(range(n))
    row = 0
    for _ in range(num_walks):
        for i in range(n - 1, 0, -1):
            j = rng.below(i + 1)
            order[i], order[j] = order[j], order[i]
        for start in order:
            walk = [start]
            cur, prev = start, -1
            while len(walk) < walk_length:
                lo = indptr_l[cur]
                deg = indptr_l[cur + 1] - lo
                if deg == 0:
                    break
                while True:
                    nxt = indices_l[lo + rng.alias_draw(lo, deg, prob_l, alias_l)]
                    if not biased or prev < 0:
                        break
                    if nxt == prev:
                        bias = inv_p
                    elif nxt in neighbor_sets[prev]:
                        bias = 1.0
                    else:
                        bias = inv_q
                    if rng.uniform() * max_bias < bias:
                        break
                walk.append(nxt)
                prev, cur = cur, nxt
            walks[row, : len(walk)] = walk
            lengths[row] = len(walk)
            row += 1
    return walks, lengths


def train_sgns(walks, lengths, target, context, window, negative, neg_prob, neg_alias,
               lr0, min_lr_ratio, total_pairs, epochs, seed, loss_buckets=0):
    rng = SplitMix64(seed)
    n_nodes = len(neg_prob)
    prob_l = [float(x) for x in neg_prob]
    alias_l = [int(x) for x in neg_alias]
    track = loss_buckets > 0
    sums = np.zeros(max(loss_buckets, 1))
    counts = np.zeros(max(loss_buckets, 1))
    done = 0
    for _ in range(epochs):
        for w in range(walks.shape[0]):
            L = int(lengths[w])
            walk = walks[w, :L].tolist()
            for i in range(L):
                for j in range(max(0, i - window), min(L, i + window + 1)):
                    if j == i:
                        continue
                    lr = lr0 * max(min_lr_ratio, 1.0 - done / total_pairs)
                    negs = [rng.alias_draw(0, n_nodes, prob_l, alias_l) for _ in range(negative)]
                    loss = pair_update(target, context, walk[i], walk[j], negs, lr, track)
                    if track:
                        b = done * loss_buckets // total_pairs
                        sums[b] += loss
                        counts[b] += 1.0
                    done += 1
    if not track:
        return None
    return sums / np.maximum(counts, 1.0)


def train_line(edge_u, edge_v, edge_prob, edge_alias, target, context, order, negative,
               neg_prob, neg_alias, lr0, min_lr_ratio, samples, seed, loss_buckets=0):
    rng = SplitMix64(seed)
    n_edges, n_nodes = len(edge_u), len(neg_prob)
    eu, ev = [int(x) for x in edge_u], [int(x) for x in edge_v]
    eprob, ealias = [float(x) for x in edge_prob], [int(x) for x in edge_alias]
    prob_l, alias_l = [float(x) for x in neg_prob], [int(x) for x in neg_alias]
    V = target if order == 1 else context
    track = loss_buckets > 0
    sums = np.zeros(max(loss_buckets, 1))
    counts = np.zeros(max(loss_buckets, 1))
    for t in range(samples):
        lr = lr0 * max(min_lr_ratio, 1.0 - t / samples)
        e = rng.alias_draw(0, n_edges, eprob, ealias)
        if rng.uniform() < 0.5:
            a, b = eu[e], ev[e]
        else:
            a, b = ev[e], eu[e]
        negs = []
        for _ in range(negative):
            x = rng.alias_draw(0, n_nodes, prob_l, alias_l)
            negs.append(b if order == 1 and x == a else x)
        loss = pair_update(target, V, a, b, negs, lr, track)
        if track:
            k = t * loss_buckets // samples
            sums[k] += loss
            counts[k] += 1.0
    if not track:
        return None
    return sums / np.maximum(counts, 1.0)
