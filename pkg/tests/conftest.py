import itertools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hsrl.graph import Graph  # noqa: E402
from hsrl.kernels import BACKENDS  # noqa: E402

TWO_TRIANGLES = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]


def random_graph(n, p, seed, weighted=False, loops=False):
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 0 if loops else 1)
    keep = rng.random(iu.size) < p
    w = rng.uniform(0.5, 3.0, keep.sum()) if weighted else None
    return Graph(n, iu[keep], iv[keep], w)


def planted_graph(sizes, probs, seed):
    """Nested planted partition.

    ``sizes`` = (super blocks, sub blocks per super, nodes per sub); ``probs`` =
    (within sub, within super, across).
    """
    n_super, n_sub, per = sizes
    n = n_super * n_sub * per
    sub = np.arange(n) // per
    sup = np.arange(n) // (per * n_sub)
    iu, iv = np.triu_indices(n, 1)
    p = np.where(sub[iu] == sub[iv], probs[0], np.where(sup[iu] == sup[iv], probs[1], probs[2]))
    keep = np.random.default_rng(seed).random(p.size) < p
    return Graph(n, iu[keep], iv[keep])


def two_cliques(size=5):
    edges = [(a, b) for a, b in itertools.combinations(range(size), 2)]
    edges += [(a + size, b + size) for a, b in edges]
    return Graph.from_edges(2 * size, edges)


@pytest.fixture
def two_triangles():
    return Graph.from_edges(6, TWO_TRIANGLES)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param
