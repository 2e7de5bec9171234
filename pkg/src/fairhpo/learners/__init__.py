"""Native desk-scale learners driven by the built-in search spaces: bagged
gini CART forests, Newton-gain gradient boosting with logistic loss, and a
minibatch-Adam MLP.

Training is deterministic given (config, data, seed): per-tree RNG streams
are pre-split from the seed, so predictions are byte-identical across runs
and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from fairhpo.learners import _mlp
from fairhpo.learners._trees import Tree, grow_gini, grow_newton, remap_features
from fairhpo.space import Configuration, LearnerId

__all__ = ["TrainedModel", "train", "predict"]


@dataclass(frozen=True)
class TrainedModel:
    learner_id: LearnerId
    seed: int
    n_features: int
    state: Any
    degenerate: bool = False  # constant-predictor fallback (single-class y)
    scaling: tuple[np.ndarray, np.ndarray] | None = None  # MLP min-max (lo, span)

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Positive-class score per row (probability-like, in [0,1])."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} feature columns, got {X.shape}")
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        if self.degenerate:
            return np.full(X.shape[0], float(self.state))
        if self.learner_id is LearnerId.RANDOM_FOREST:
            trees: list[Tree] = self.state
            acc = np.zeros(X.shape[0])
            for t in trees:
                acc += t.apply(X)
            return acc / len(trees)
        if self.learner_id is LearnerId.GRAD_BOOST:
            f0, eta, trees = self.state
            raw = np.full(X.shape[0], f0)
            for t in trees:
                raw += eta * t.apply(X)
            return _mlp._sigmoid(raw)
        net: _mlp.MlpNet = self.state
        lo, span = self.scaling
        return net.scores(_mlp.apply_minmax(X, lo, span))


def _check_training_inputs(X: np.ndarray, y: np.ndarray):
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"X must be a non-empty 2-d matrix, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ValueError(f"y length {y.shape} does not match X rows {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")


def _feat_count(frac: float, n: int) -> int:
    return min(max(int(math.ceil(frac * n)), 1), n)


def _train_forest(values: dict, X, y, seed: int) -> TrainedModel:
    n_trees = int(values["n_estimators"])
    n_feat = _feat_count(float(values["max_features"]), X.shape[1])
    bootstrap = bool(values.get("bootstrap", True))
    m = X.shape[0]
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        rows = rng.integers(0, m, m) if bootstrap else np.arange(m)
        tree_seed = int(rng.integers(1 << 63))
        trees.append(grow_gini(X[rows], y[rows],
                               max_depth=int(values["max_depth"]),
                               min_split=int(values["min_samples_split"]),
                               min_leaf=int(values["min_samples_leaf"]),
                               n_feat_split=n_feat, seed=tree_seed))
    return TrainedModel(LearnerId.RANDOM_FOREST, seed, X.shape[1], trees)


def _train_boost(values: dict, X, y, seed: int) -> TrainedModel:
    n_rounds = int(values["n_estimators"])
    eta = float(values["eta"])
    lam = float(values["reg_lambda"])
    n_feat = _feat_count(float(values["colsample_bytree"]), X.shape[1])
    p_prior = float(np.mean(y))
    f0 = math.log(p_prior / (1.0 - p_prior))
    raw = np.full(X.shape[0], f0)
    yf = y.astype(np.float64)
    streams = np.random.SeedSequence(seed).spawn(n_rounds)
    trees = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        cols = np.sort(rng.permutation(X.shape[1])[:n_feat])
        p = _mlp._sigmoid(raw)
        grad = p - yf
        hess = p * (1.0 - p)
        tree = grow_newton(X[:, cols], grad, hess,
                           max_depth=int(values["max_depth"]), reg_lambda=lam)
        tree = remap_features(tree, cols)
        trees.append(tree)
        raw = raw + eta * tree.apply(X)
    return TrainedModel(LearnerId.GRAD_BOOST, seed, X.shape[1], (f0, eta, trees))


def _train_mlp(values: dict, X, y, seed: int) -> TrainedModel:
    lo, span = _mlp.fit_minmax(X)
    Xs = _mlp.apply_minmax(X, lo, span)
    net = _mlp.MlpNet(X.shape[1], depth=int(values["depth"]),
                      width=int(values["width"]), seed=seed)
    net.fit(Xs, y.astype(np.float64),
            batch_size=int(values["batch_size"]),
            alpha=float(values["alpha"]),
            lr=float(values["learning_rate_init"]),
            n_iter_no_change=int(values["n_iter_no_change"]))
    return TrainedModel(LearnerId.MLP, seed, X.shape[1], net, scaling=(lo, span))


def train(learner_id: LearnerId | str, config: Configuration | dict,
          X, y, seed: int) -> TrainedModel:
    """Fit a model; single-class targets fall back to a flagged constant
    predictor so cross-validation folds never abort an optimization run."""
    learner_id = LearnerId(learner_id)
    values = config.values if isinstance(config, Configuration) else dict(config)
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    _check_training_inputs(X, y)

    classes = np.unique(y)
    if classes.size == 1:
        return TrainedModel(learner_id, seed, X.shape[1],
                            state=int(classes[0]), degenerate=True)
    if learner_id is LearnerId.RANDOM_FOREST:
        return _train_forest(values, X, y, seed)
    if learner_id is LearnerId.GRAD_BOOST:
        return _train_boost(values, X, y, seed)
    return _train_mlp(values, X, y, seed)


def predict(model: TrainedModel, X) -> np.ndarray:
    """Hard labels at the 0.5 score threshold."""
    scores = model.scores(np.asarray(X, dtype=np.float64))
    return (scores >= 0.5).astype(np.int8)
