import numpy as np
import pytest

from conftest import planted_graph, random_graph
from hsrl.graph import Graph
from hsrl.learners import LearnerConfig, learn_embeddings
from hsrl.louvain import Hierarchy, hierarchical_sampling
from hsrl.pipeline import chain_matrix, concatenate_levels, membership_chain, run_hsrl

FAST = LearnerConfig(dim=8, walks_per_node=2, walk_length=10, line_samples=500)


def random_hierarchy(seed, sizes=(40, 12, 5, 2)):
    """Random nested membership maps with surjective levels."""
    rng = np.random.default_rng(seed)
    graphs = [Graph(n, [], []) for n in sizes]
    memberships = []
    for a, b in zip(sizes, sizes[1:]):
        m = np.concatenate([np.arange(b), rng.integers(0, b, a - b)])
        memberships.append(rng.permutation(m))
    return Hierarchy(graphs, memberships)


def test_k_zero_is_plain_embedding(two_triangles):
    res = run_hsrl(two_triangles, 0, FAST)
    assert res.final.shape == (6, 8)
    assert np.array_equal(res.final, learn_embeddings(two_triangles, FAST))


def test_width_grows_with_achieved_levels():
    g = planted_graph((4, 4, 16), (0.2, 0.04, 0.005), 0)
    res = run_hsrl(g, 3, LearnerConfig(dim=64, walks_per_node=1, walk_length=10))
    assert res.hierarchy.achieved_levels == 3
    assert res.final.shape == (256, 256)


def test_early_stop_shrinks_width(two_triangles):
    res = run_hsrl(two_triangles, 3, FAST)
    assert res.hierarchy.achieved_levels == 1
    assert res.final.shape == (6, 16)


def test_level_seeds_and_threads_agree():
    g = random_graph(40, 0.1, 2)
    a = run_hsrl(g, 2, FAST.replace(seed=3))
    b = run_hsrl(g, 2, FAST.replace(seed=3), workers=3)
    assert np.array_equal(a.final, b.final)
    for k, (Z, level) in enumerate(zip(a.per_level, a.hierarchy.graphs)):
        assert np.array_equal(Z, learn_embeddings(level, FAST.replace(seed=3 + k)))


def test_line_on_loop_only_level_falls_back_to_init(two_triangles):
    res = run_hsrl(two_triangles, 2, FAST, learner="line")
    assert res.final.shape == (6, 16)
    assert np.all(np.isfinite(res.final))


def test_membership_chain(two_triangles):
    h = hierarchical_sampling(two_triangles, 3)
    assert [membership_chain(h, i, 0) for i in range(6)] == list(range(6))
    a = {membership_chain(h, i, 1) for i in (0, 1, 2)}
    b = {membership_chain(h, i, 1) for i in (3, 4, 5)}
    assert len(a) == len(b) == 1 and a != b
    with pytest.raises(IndexError):
        membership_chain(h, 0, 2)
    with pytest.raises(IndexError):
        membership_chain(h, 6, 0)


@pytest.mark.parametrize("seed", range(5))
def test_concatenation_blocks_and_dot_products(seed):
    h = random_hierarchy(seed)
    rng = np.random.default_rng(100 + seed)
    d = 4
    per_level = [rng.normal(size=(g.node_count, d)) for g in h.graphs]
    final = concatenate_levels(h, per_level)
    chain = chain_matrix(h)
    for i in range(40):
        for k in range(4):
            assert np.array_equal(final[i, k * d:(k + 1) * d], per_level[k][membership_chain(h, i, k)])
            assert chain[i, k] == membership_chain(h, i, k)
    for i, j in rng.integers(0, 40, size=(200, 2)):
        parts = sum(per_level[k][chain[i, k]] @ per_level[k][chain[j, k]] for k in range(4))
        assert abs(final[i] @ final[j] - parts) < 1e-9
        if np.array_equal(chain[i, 1:], chain[j, 1:]):
            assert np.array_equal(final[i, d:], final[j, d:])


def test_shared_levels_never_lower_shared_contribution():
    # with nonnegative coarse vectors, sharing one more community adds a
    # nonnegative squared-norm-like term to the coarse-block dot product
    h = random_hierarchy(0)
    rng = np.random.default_rng(1)
    per_level = [rng.random((g.node_count, 3)) for g in h.graphs]
    final = concatenate_levels(h, per_level)
    chain = chain_matrix(h)
    for i, j in rng.integers(0, 40, size=(300, 2)):
        shared = [k for k in range(1, 4) if chain[i, k] == chain[j, k]]
        contribution = sum(per_level[k][chain[i, k]] @ per_level[k][chain[j, k]] for k in shared)
        assert contribution >= 0.0
        assert np.isclose(
            contribution,
            sum(final[i, k * 3:(k + 1) * 3] @ final[j, k * 3:(k + 1) * 3] for k in shared),
        )


def test_mutating_a_level_touches_only_its_block():
    h = random_hierarchy(3)
    rng = np.random.default_rng(0)
    per_level = [rng.normal(size=(g.node_count, 2)) for g in h.graphs]
    before = concatenate_levels(h, per_level)
    per_level[2][1] += 5.0
    after = concatenate_levels(h, per_level)
    changed = np.nonzero(np.any(before != after, axis=0))[0]
    assert set(changed.tolist()) <= {4, 5}
    rows = np.nonzero(np.any(before != after, axis=1))[0]
    assert set(rows.tolist()) == set(np.nonzero(chain_matrix(h)[:, 2] == 1)[0].tolist())


def test_concatenate_validates_shapes():
    h = random_hierarchy(0)
    with pytest.raises(ValueError):
        concatenate_levels(h, [np.zeros((40, 2))])
    with pytest.raises(ValueError):
        concatenate_levels(h, [np.zeros((40, 2)), np.zeros((11, 2)), np.zeros((5, 2)), np.zeros((2, 2))])
