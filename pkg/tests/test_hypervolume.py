import numpy as np
import pytest

from fairhpo.moo import (HvSpec, hv_monte_carlo, hypervolume_exact,
                         normalized_hypervolume, pareto_front_indices)


def unit_spec(d):
    return HvSpec(lower=np.zeros(d), upper=np.ones(d))


def random_front(rng, n, d):
    pts = rng.random((n, d))
    return pts[pareto_front_indices(pts)]


def test_single_point_rectangle():
    assert hypervolume_exact(np.array([[0.5, 0.5]]), unit_spec(2)) == \
        pytest.approx(0.25, abs=1e-15)


def test_two_point_inclusion_exclusion():
    hv = hypervolume_exact(np.array([[0.2, 0.8], [0.8, 0.2]]), unit_spec(2))
    assert hv == pytest.approx(0.28, abs=1e-12)


def test_point_at_origin_fills_box():
    for d in (2, 3, 4):
        hv = hypervolume_exact(np.vstack([np.zeros(d), np.full(d, 0.5)]),
                               unit_spec(d))
        assert hv == pytest.approx(1.0, abs=1e-12)


def test_below_lower_bound_rejected():
    with pytest.raises(ValueError, match="below lower bound"):
        hypervolume_exact(np.array([[-0.1, 0.5]]), unit_spec(2))
    # within clamping tolerance is fine
    hv = hypervolume_exact(np.array([[-1e-12, 0.5]]), unit_spec(2))
    assert hv == pytest.approx(0.5, abs=1e-9)


def test_monte_carlo_empty_and_full():
    assert hv_monte_carlo(np.empty((0, 2)), unit_spec(2), 10_000, 0) == 0.0
    hv = hv_monte_carlo(np.array([[0.0, 0.0]]), unit_spec(2), 100_000, 1)
    assert hv == pytest.approx(1.0, abs=0.003)
    with pytest.raises(ValueError):
        hv_monte_carlo(np.array([[0.5, 0.5]]), unit_spec(2), 100, 0)


def test_exact_matches_monte_carlo_small():
    rng = np.random.default_rng(5)
    for d in (2, 3):
        for _ in range(3):
            front = random_front(rng, 30, d)
            spec = unit_spec(d)
            exact = hypervolume_exact(front, spec)
            est = hv_monte_carlo(front, spec, 200_000, 7)
            sigma = np.sqrt(max(exact * (1 - exact), 1e-9) / 200_000)
            assert abs(exact - est) <= max(3 * sigma, 0.004)


def test_hv_monotone_under_new_nondominated_point():
    rng = np.random.default_rng(8)
    for _ in range(20):
        front = random_front(rng, 20, 3)
        spec = unit_spec(3)
        base = hypervolume_exact(front, spec)
        extra = rng.random(3) * 0.5
        grown = hypervolume_exact(np.vstack([front, extra]), spec)
        assert grown >= base - 1e-12


def test_hv_dominance_consistency():
    rng = np.random.default_rng(9)
    for _ in range(10):
        a = random_front(rng, 15, 2)
        b = np.clip(a + 0.15, 0, 1)  # collectively dominated by a
        spec = unit_spec(2)
        assert hypervolume_exact(a, spec) >= hypervolume_exact(b, spec) - 1e-12


def test_custom_bounds_and_reference():
    spec = HvSpec(lower=np.array([0.0, 10.0]), upper=np.array([2.0, 30.0]))
    # point at (1.0, 20.0) normalizes to (0.5, 0.5)
    hv = hypervolume_exact(np.array([[1.0, 20.0]]), spec)
    assert hv == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ValueError):
        HvSpec(lower=np.array([1.0, 0.0]), upper=np.array([1.0, 2.0]))


def test_normalized_hv_front_extraction_and_edges():
    lower, upper = [0.0, 0.0], [1.0, 1.0]
    # the single ideal point
    assert normalized_hypervolume(np.array([[0.0, 0.0]]), lower, upper) == \
        pytest.approx(1.0)
    # front on the reference point
    assert normalized_hypervolume(np.array([[1.0, 1.0]]), lower, upper) == 0.0
    pts = np.array([[0.3, 0.4], [0.6, 0.9], [0.9, 0.9]])  # last two dominated
    with_dom = normalized_hypervolume(pts, lower, upper)
    without = normalized_hypervolume(pts[:1], lower, upper)
    assert with_dom == pytest.approx(without, abs=1e-12)


def test_normalized_hv_clips_out_of_bound_points():
    lower, upper = [0.0, 0.0], [1.0, 1.0]
    pts = np.array([[-0.5, 0.5], [2.0, 2.0]])
    # below-lower clips to the bound; beyond-reference contributes nothing
    assert normalized_hypervolume(pts, lower, upper) == pytest.approx(0.5)
