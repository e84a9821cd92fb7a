# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled walk and SGD kernels.

Must stay draw-for-draw identical with ``_pykernels``: same splitmix64
stream, same order of random draws, same update order.
"""
import numpy as np

from libc.math cimport exp, log1p
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] += 0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t* state) noexcept nogil:
    return (_next(state) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t _below(uint64_t* state, int64_t n) noexcept nogil:
    cdef int64_t r = <int64_t>(_uniform(state) * n)
    if r >= n:
        r = n - 1
    return r


cdef inline int64_t _alias_draw(uint64_t* state, int64_t lo, int64_t n,
                                const double[::1] prob, const int64_t[::1] alias) noexcept nogil:
    cdef int64_t i = lo + _below(state, n)
    if _uniform(state) < prob[i]:
        return i - lo
    return alias[i]


cdef inline bint _is_neighbor(const int64_t[::1] indptr, const int64_t[::1] indices,
                              int64_t u, int64_t v) noexcept nogil:
    cdef int64_t lo = indptr[u], hi = indptr[u + 1], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == v


cdef inline double _log_sigmoid_loss(double x, bint positive) noexcept nogil:
    # -log(sigmoid(x)) for positives, -log(sigmoid(-x)) for negatives
    if not positive:
        x = -x
    if x >= 0:
        return log1p(exp(-x))
    return -x + log1p(exp(x))


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef double _pair_update(double[:, ::1] Z, double[:, ::1] V, int64_t a, int64_t pos,
                         int64_t* negs, int64_t n_neg, double lr, double* neu,
                         bint track) noexcept nogil:
    """One SGNS step for source row ``Z[a]`` against ``V[pos]`` and negatives."""
    cdef int64_t d = Z.shape[1], j, s, tgt
    cdef double f, g, loss = 0.0
    for j in range(d):
        neu[j] = 0.0
    for s in range(n_neg + 1):
        if s == 0:
            tgt = pos
        else:
            tgt = negs[s - 1]
            if tgt == pos:
                continue
        f = 0.0
        for j in range(d):
            f += Z[a, j] * V[tgt, j]
        if track:
            loss += _log_sigmoid_loss(f, s == 0)
        g = ((1.0 if s == 0 else 0.0) - _sigmoid(f)) * lr
        for j in range(d):
            neu[j] += g * V[tgt, j]
        for j in range(d):
            V[tgt, j] += g * Z[a, j]
    for j in range(d):
        Z[a, j] += neu[j]
    return loss


def pair_update(double[:, ::1] Z, double[:, ::1] V, int64_t a, int64_t pos,
                const int64_t[::1] negatives, double lr, bint track=True):
    """Single SGNS update, exposed for gradient checks."""
    cdef int64_t n_neg = negatives.shape[0], s
    cdef int64_t* negs = <int64_t*>malloc((n_neg + 1) * sizeof(int64_t))
    cdef double* neu = <double*>malloc(Z.shape[1] * sizeof(double))
    cdef double loss
    try:
        for s in range(n_neg):
            negs[s] = negatives[s]
        loss = _pair_update(Z, V, a, pos, negs, n_neg, lr, neu, track)
    finally:
        free(negs)
        free(neu)
    return loss


def random_walks(const int64_t[::1] indptr, const int64_t[::1] indices,
                 const double[::1] prob, const int64_t[::1] alias,
                 int64_t num_walks, int64_t walk_length, double p, double q,
                 uint64_t seed):
    """Return ``(walks, lengths)``; walks are padded with -1."""
    cdef int64_t n = indptr.shape[0] - 1
    walks_np = np.full((num_walks * n, walk_length), -1, dtype=np.int64)
    lengths_np = np.zeros(num_walks * n, dtype=np.int64)
    order_np = np.arange(n, dtype=np.int64)
    cdef int64_t[:, ::1] walks = walks_np
    cdef int64_t[::1] lengths = lengths_np
    cdef int64_t[::1] order = order_np
    cdef uint64_t state = seed
    cdef bint biased = not (p == 1.0 and q == 1.0)
    cdef double inv_p = 1.0 / p, inv_q = 1.0 / q, max_bias, bias
    cdef int64_t r, i, j, tmp, row = 0, cur, prev, lo, deg, nxt, step
    max_bias = 1.0
    if inv_p > max_bias:
        max_bias = inv_p
    if inv_q > max_bias:
        max_bias = inv_q
    with nogil:
        for r in range(num_walks):
            for i in range(n - 1, 0, -1):
                j = _below(&state, i + 1)
                tmp = order[i]
                order[i] = order[j]
                order[j] = tmp
            for i in range(n):
                cur = order[i]
                walks[row, 0] = cur
                step = 1
                prev = -1
                while step < walk_length:
                    lo = indptr[cur]
                    deg = indptr[cur + 1] - lo
                    if deg == 0:
                        break
                    while True:
                        nxt = indices[lo + _alias_draw(&state, lo, deg, prob, alias)]
                        if not biased or prev < 0:
                            break
                        if nxt == prev:
                            bias = inv_p
                        elif _is_neighbor(indptr, indices, prev, nxt):
                            bias = 1.0
                        else:
                            bias = inv_q
                        if _uniform(&state) * max_bias < bias:
                            break
                    walks[row, step] = nxt
                    prev = cur
                    cur = nxt
                    step += 1
                lengths[row] = step
                row += 1
    return walks_np, lengths_np


def train_sgns(const int64_t[:, ::1] walks, const int64_t[::1] lengths,
               double[:, ::1] target, double[:, ::1] context,
               int64_t window, int64_t negative,
               const double[::1] neg_prob, const int64_t[::1] neg_alias,
               double lr0, double min_lr_ratio, int64_t total_pairs, int64_t epochs,
               uint64_t seed, int64_t loss_buckets=0):
    """Skip-gram with negative sampling over a padded walk corpus.

    Updates ``target`` and ``context`` in place.  Returns per-bucket mean
    pair losses when ``loss_buckets > 0``.
    """
    cdef int64_t n_walks = walks.shape[0], n_nodes = neg_prob.shape[0]
    cdef int64_t w, i, j, L, lo_j, hi_j, s, e, bucket, done = 0
    cdef uint64_t state = seed
    cdef double lr, frac, loss
    cdef bint track = loss_buckets > 0
    sums_np = np.zeros(max(loss_buckets, 1), dtype=np.float64)
    counts_np = np.zeros(max(loss_buckets, 1), dtype=np.float64)
    cdef double[::1] sums = sums_np
    cdef double[::1] counts = counts_np
    cdef int64_t* negs = <int64_t*>malloc((negative + 1) * sizeof(int64_t))
    cdef double* neu = <double*>malloc(target.shape[1] * sizeof(double))
    try:
        with nogil:
            for e in range(epochs):
                for w in range(n_walks):
                    L = lengths[w]
                    for i in range(L):
                        lo_j = i - window
                        if lo_j < 0:
                            lo_j = 0
                        hi_j = i + window + 1
                        if hi_j > L:
                            hi_j = L
                        for j in range(lo_j, hi_j):
                            if j == i:
                                continue
                            frac = 1.0 - (<double>done) / total_pairs
                            if frac < min_lr_ratio:
                                frac = min_lr_ratio
                            lr = lr0 * frac
                            for s in range(negative):
                                negs[s] = _alias_draw(&state, 0, n_nodes, neg_prob, neg_alias)
                            loss = _pair_update(target, context, walks[w, i], walks[w, j],
                                                negs, negative, lr, neu, track)
                            if track:
                                bucket = done * loss_buckets // total_pairs
                                sums[bucket] += loss
                                counts[bucket] += 1.0
                            done += 1
    finally:
        free(negs)
        free(neu)
    if not track:
        return None
    return sums_np / np.maximum(counts_np, 1.0)


def train_line(const int64_t[::1] edge_u, const int64_t[::1] edge_v,
               const double[::1] edge_prob, const int64_t[::1] edge_alias,
               double[:, ::1] target, double[:, ::1] context, int64_t order,
               int64_t negative, const double[::1] neg_prob, const int64_t[::1] neg_alias,
               double lr0, double min_lr_ratio, int64_t samples, uint64_t seed,
               int64_t loss_buckets=0):
    """Edge-sampling training for first- (``order=1``) or second-order proximity."""
    cdef int64_t n_edges = edge_u.shape[0], n_nodes = neg_prob.shape[0]
    cdef int64_t t, e, a, b, s, bucket
    cdef uint64_t state = seed
    cdef double lr, frac, loss
    cdef bint track = loss_buckets > 0
    cdef double[:, ::1] V = target if order == 1 else context
    sums_np = np.zeros(max(loss_buckets, 1), dtype=np.float64)
    counts_np = np.zeros(max(loss_buckets, 1), dtype=np.float64)
    cdef double[::1] sums = sums_np
    cdef double[::1] counts = counts_np
    cdef int64_t* negs = <int64_t*>malloc((negative + 1) * sizeof(int64_t))
    cdef double* neu = <double*>malloc(target.shape[1] * sizeof(double))
    try:
        with nogil:
            for t in range(samples):
                frac = 1.0 - (<double>t) / samples
                if frac < min_lr_ratio:
                    frac = min_lr_ratio
                lr = lr0 * frac
                e = _alias_draw(&state, 0, n_edges, edge_prob, edge_alias)
                if _uniform(&state) < 0.5:
                    a = edge_u[e]
                    b = edge_v[e]
                else:
                    a = edge_v[e]
                    b = edge_u[e]
                for s in range(negative):
                    negs[s] = _alias_draw(&state, 0, n_nodes, neg_prob, neg_alias)
                    if order == 1 and negs[s] == a:
                        negs[s] = b  # skipped by the update as it equals the positive
                loss = _pair_update(target, V, a, b, negs, negative, lr, neu, track)
                if track:
                    bucket = t * loss_buckets // samples
                    sums[bucket] += loss
                    counts[bucket] += 1.0
    finally:
        free(negs)
        free(neu)
    if not track:
        return None
    return sums_np / np.maximum(counts_np, 1.0)
