import numpy as np
import pytest

from _oracles import brute_pareto_mask, peel_fronts
from fairhpo.moo import (crowding_distance, dominates, non_dominated_sort,
                         pareto_front_indices)


def test_dominates_basic():
    assert dominates([1, 2], [2, 2])
    assert not dominates([1, 2], [2, 1])
    assert not dominates([2, 1], [1, 2])
    assert not dominates([1, 2], [1, 2])  # strictness
    with pytest.raises(ValueError):
        dominates([1, 2], [1, 2, 3])


def test_sort_three_point_example():
    pts = np.array([[1, 2], [2, 1], [3, 3]])
    fronts = non_dominated_sort(pts)
    assert sorted(fronts[0].tolist()) == [0, 1]
    assert fronts[1].tolist() == [2]


def test_sort_single_and_duplicates():
    assert non_dominated_sort(np.array([[1.0, 1.0]]))[0].tolist() == [0]
    fronts = non_dominated_sort(np.array([[1.0, 2.0], [1.0, 2.0]]))
    assert sorted(fronts[0].tolist()) == [0, 1]


def test_sort_matches_peeling_oracle():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5):
        for _ in range(5):
            pts = rng.random((80, d))
            fronts = non_dominated_sort(pts)
            expected = peel_fronts(pts)
            assert len(fronts) == len(expected)
            for got, exp in zip(fronts, expected):
                assert np.array_equal(np.sort(got), exp)


def test_front_indices_match_brute_mask():
    rng = np.random.default_rng(3)
    for _ in range(20):
        pts = rng.random((60, 3))
        idx = pareto_front_indices(pts)
        mask = brute_pareto_mask(pts)
        assert sorted(idx.tolist()) == np.flatnonzero(mask).tolist()


def test_crowding_two_points_infinite():
    assert np.all(np.isinf(crowding_distance(np.array([[0.0, 1.0], [1.0, 0.0]]))))


def test_crowding_equally_spaced_middle():
    front = np.array([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
    d = crowding_distance(front)
    assert np.isinf(d[0]) and np.isinf(d[2])
    assert d[1] == pytest.approx(2.0)


def test_crowding_identical_points_zero_interior():
    front = np.tile([0.3, 0.7], (4, 1))
    d = crowding_distance(front)
    assert np.isinf(d[0]) and np.isinf(d[-1])
    assert d[1] == 0.0 and d[2] == 0.0
