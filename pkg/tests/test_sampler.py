import numpy as np
import pytest

from hsrl.sampler import WeightedSampler, build_alias, build_segment_alias


def test_three_to_one():
    s = WeightedSampler([3, 1])
    draws = s.sample(np.random.default_rng(0), size=100_000)
    assert abs(np.mean(draws == 0) - 0.75) < 0.02


def test_tables_encode_distribution_exactly():
    # the alias tables themselves determine the distribution: sum the mass per outcome
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = rng.random(rng.integers(1, 40)) * (rng.random() < 0.9)
        if w.sum() == 0:
            continue
        prob, alias = build_alias(w)
        mass = prob.copy()
        np.add.at(mass, alias, 1.0 - prob)
        assert np.allclose(mass / w.size, w / w.sum(), atol=1e-12)


def test_rejects_bad_weights():
    with pytest.raises(ValueError):
        WeightedSampler([0.0, 0.0])
    with pytest.raises(ValueError):
        WeightedSampler([1.0, -1.0])
    with pytest.raises(ValueError):
        WeightedSampler([])


def test_segment_alias_offsets_are_local():
    indptr = np.array([0, 2, 2, 5])
    prob, alias = build_segment_alias(indptr, np.array([1.0, 3.0, 2.0, 2.0, 0.0]))
    assert np.all(alias[:2] < 2)
    assert np.all(alias[2:] < 3)
