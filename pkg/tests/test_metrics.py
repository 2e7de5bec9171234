import numpy as np
import pytest

from _oracles import (brute_ddsp, brute_deod, brute_deop, brute_f1_objective,
                      brute_invd, brute_invd_sim)
from conftest import random_prediction_set
from fairhpo.metrics import (MetricId, MetricUndefinedError, PredictionSet,
                             ddsp, deod, deop, evaluate_all, f1_objective,
                             invd, invd_sim)


def pset(y, yh, a):
    return PredictionSet(y_true=np.array(y), y_pred=np.array(yh),
                         protected=np.array(a))


def test_ddsp_counting_example():
    # group A=0 preds [1,1,0,0], group A=1 preds [1,0,0,0]
    p = pset([0] * 8, [1, 1, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 1, 1, 1])
    assert ddsp(p) == pytest.approx(0.25, abs=1e-15)


def test_ddsp_trivial_cases():
    p = pset([0, 1, 0, 1], [1, 1, 1, 1], [0, 0, 1, 1])
    assert ddsp(p) == 0.0
    p2 = pset([0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 1, 1])  # preds == protected
    assert ddsp(p2) == 1.0


def test_ddsp_empty_group_raises():
    p = PredictionSet(y_true=np.array([0, 1, 0, 1]),
                      y_pred=np.array([0, 1, 0, 1]),
                      protected=np.array([0, 0, 0, 0]))
    with pytest.raises(MetricUndefinedError, match="undefined group rate"):
        ddsp(p)


def test_deop_tpr_gap():
    y = [1, 1, 0, 0, 1, 1, 0, 0]
    yh = [1, 0, 1, 0, 1, 1, 0, 0]
    a = [0, 0, 0, 0, 1, 1, 1, 1]
    v, flag = deop(pset(y, yh, a))
    assert v == pytest.approx(0.5) and not flag


def test_deop_perfect_predictions_zero():
    y = [1, 0, 1, 0]
    v, flag = deop(pset(y, y, [0, 0, 1, 1]))
    assert v == 0.0 and not flag


def test_deop_empty_cell_flags():
    # group A=1 has no Y=1 rows
    v, flag = deop(pset([1, 1, 0, 0], [1, 0, 1, 0], [0, 0, 1, 1]))
    assert v == 0.0 and flag


def test_deod_averages_tpr_and_fpr_gaps():
    y = [1, 1, 0, 0, 1, 1, 0, 0]
    yh = [1, 0, 1, 0, 1, 1, 0, 0]
    a = [0, 0, 0, 0, 1, 1, 1, 1]
    v, flag = deod(pset(y, yh, a))
    assert v == pytest.approx(0.5) and not flag  # (0.5 + 0.5) / 2


def test_deod_group_independent_predictions_zero():
    y = [1, 1, 0, 0, 1, 1, 0, 0]
    yh = [1, 0, 1, 0, 1, 0, 1, 0]
    a = [0, 0, 0, 0, 1, 1, 1, 1]
    v, _ = deod(pset(y, yh, a))
    assert v == 0.0


def test_invd_printed_formula_cases():
    assert invd(pset([0, 1], [1, 0], [0, 1])) == pytest.approx(0.5)
    assert invd(pset([0, 1, 0, 1], [1, 1, 1, 1], [0, 1, 0, 1])) == 0.0
    # yhat == y, balanced halves -> 2*(m/2)^2/m^2 = 0.5
    y = [0] * 8 + [1] * 8
    assert invd(pset(y, y, [0, 1] * 8)) == pytest.approx(0.5)


def test_invd_sim_cases():
    assert invd_sim(pset([0, 1], [0, 1], [0, 1])) == 0.0
    assert invd_sim(pset([1, 1], [1, 0], [0, 1])) == pytest.approx(0.5)
    assert invd_sim(pset([1, 0, 1, 0], [1, 1, 1, 1], [0, 1, 0, 1])) == 0.0


def test_f1_objective_cases():
    y = [1, 0, 1, 0]
    assert f1_objective(pset(y, y, [0, 1, 0, 1])) == 0.0
    # TP=1, FP=1, FN=1 -> 1 - 2/4
    assert f1_objective(pset([1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1])) == \
        pytest.approx(0.5)
    assert f1_objective(pset([1, 1, 0, 0], [0, 0, 0, 0], [0, 1, 0, 1])) == 1.0
    # no positives anywhere: vacuously perfect
    assert f1_objective(pset([0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 1])) == 0.0


def test_evaluate_all_order_and_flags():
    p = pset([1, 0, 1, 0], [1, 0, 1, 0], [0, 1, 0, 1])
    v1 = evaluate_all(p, [MetricId.DDSP, MetricId.F1_OBJ])
    v2 = evaluate_all(p, [MetricId.F1_OBJ, MetricId.DDSP])
    assert v1.as_dict() == v2.as_dict()
    assert v1.metric_ids == (MetricId.DDSP, MetricId.F1_OBJ)
    five = evaluate_all(p, [MetricId.F1_OBJ, MetricId.DDSP, MetricId.DEOD,
                            MetricId.DEOP, MetricId.INVD])
    assert len(five.values) == 5
    with pytest.raises(ValueError, match="duplicate"):
        evaluate_all(p, [MetricId.DDSP, MetricId.DDSP])


def test_metrics_match_brute_force_oracles():
    rng = np.random.default_rng(42)
    for _ in range(300):
        p = random_prediction_set(rng)
        y, yh, a = p.y_true, p.y_pred, p.protected
        assert ddsp(p) == pytest.approx(brute_ddsp(y, yh, a), abs=1e-12)
        assert deop(p) == pytest.approx(brute_deop(y, yh, a), abs=1e-12)
        assert deod(p) == pytest.approx(brute_deod(y, yh, a), abs=1e-12)
        assert invd(p) == pytest.approx(brute_invd(y, yh), abs=1e-12)
        assert invd_sim(p) == pytest.approx(brute_invd_sim(y, yh), abs=1e-12)
        assert f1_objective(p) == pytest.approx(brute_f1_objective(y, yh), abs=1e-12)


def test_group_swap_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(100):
        p = random_prediction_set(rng)
        q = PredictionSet(y_true=p.y_true, y_pred=p.y_pred,
                          protected=1 - p.protected)
        assert ddsp(p) == pytest.approx(ddsp(q), abs=1e-15)
        assert deod(p)[0] == pytest.approx(deod(q)[0], abs=1e-15)
        assert deop(p)[0] == pytest.approx(deop(q)[0], abs=1e-15)


def test_all_metrics_bounded_unit_interval():
    rng = np.random.default_rng(13)
    for _ in range(200):
        p = random_prediction_set(rng)
        vec = evaluate_all(p, list(MetricId))
        assert all(-1e-12 <= v <= 1 + 1e-12 for v in vec.values)


def test_permutation_invariance():
    rng = np.random.default_rng(99)
    for _ in range(50):
        p = random_prediction_set(rng)
        perm = rng.permutation(p.m)
        q = PredictionSet(y_true=p.y_true[perm], y_pred=p.y_pred[perm],
                          protected=p.protected[perm])
        v1 = evaluate_all(p, list(MetricId)).as_array()
        v2 = evaluate_all(q, list(MetricId)).as_array()
        assert np.allclose(v1, v2, atol=1e-15)


def test_prediction_set_validation():
    with pytest.raises(ValueError, match="binary"):
        PredictionSet(y_true=np.array([0, 2, 1, 0]),
                      y_pred=np.array([0, 1, 1, 0]),
                      protected=np.array([0, 1, 0, 1]))
    with pytest.raises(ValueError, match="length"):
        PredictionSet(y_true=np.array([0, 1]), y_pred=np.array([0, 1, 1]),
                      protected=np.array([0, 1]))
