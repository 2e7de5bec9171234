"""Minibatch Adam multilayer perceptron for binary classification.

Fully connected ReLU hidden layers, logistic output, L2 penalty, per-feature
min-max scaling fit on the training data, and early stopping when the
training loss fails to improve by 1e-4 for n_iter_no_change epochs.
"""

from __future__ import annotations

import numpy as np

MAX_EPOCHS = 200
LOSS_TOL = 1e-4
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def _init_params(sizes: list[int], rng: np.random.Generator):
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(X, weights, biases):
    acts = [X]
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = acts[-1] @ W + b
        acts.append(_sigmoid(z) if i == len(weights) - 1 else np.maximum(z, 0.0))
    return acts


def loss_and_grads(X, y, weights, biases, alpha):
    """Batch BCE + alpha/(2b)*sum||W||^2 and its analytic gradients."""
    b = X.shape[0]
    acts = _forward(X, weights, biases)
    p = np.clip(acts[-1][:, 0], 1e-12, 1.0 - 1e-12)
    bce = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    l2 = sum(float(np.sum(W * W)) for W in weights)
    loss = bce + 0.5 * alpha * l2 / b

    grads_w = [np.zeros_like(W) for W in weights]
    grads_b = [np.zeros_like(bb) for bb in biases]
    delta = (acts[-1] - y[:, None]) / b
    for i in range(len(weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta + (alpha / b) * weights[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (acts[i] > 0.0)
    return loss, grads_w, grads_b


class MlpNet:
    def __init__(self, n_features: int, depth: int, width: int, seed: int):
        self.sizes = [n_features] + [width] * depth + [1]
        rng = np.random.default_rng(seed)
        self.weights, self.biases = _init_params(self.sizes, rng)
        self._rng = rng
        self._adam_m = [np.zeros_like(p) for p in self.weights + self.biases]
        self._adam_v = [np.zeros_like(p) for p in self.weights + self.biases]
        self._adam_t = 0

    def _adam_step(self, grads, lr):
        self._adam_t += 1
        t = self._adam_t
        params = self.weights + self.biases
        for i, (p, g) in enumerate(zip(params, grads)):
            self._adam_m[i] = ADAM_BETA1 * self._adam_m[i] + (1 - ADAM_BETA1) * g
            self._adam_v[i] = ADAM_BETA2 * self._adam_v[i] + (1 - ADAM_BETA2) * g * g
            mhat = self._adam_m[i] / (1 - ADAM_BETA1 ** t)
            vhat = self._adam_v[i] / (1 - ADAM_BETA2 ** t)
            p -= lr * mhat / (np.sqrt(vhat) + ADAM_EPS)

    def fit(self, X, y, batch_size: int, alpha: float, lr: float,
            n_iter_no_change: int):
        m = X.shape[0]
        batch_size = max(1, min(batch_size, m))
        best = np.inf
        stall = 0
        for _ in range(MAX_EPOCHS):
            perm = self._rng.permutation(m)
            for start in range(0, m, batch_size):
                idx = perm[start:start + batch_size]
                _, gw, gb = loss_and_grads(X[idx], y[idx], self.weights,
                                           self.biases, alpha)
                self._adam_step(gw + gb, lr)
            loss, _, _ = loss_and_grads(X, y, self.weights, self.biases, alpha)
            if loss < best - LOSS_TOL:
                best = loss
                stall = 0
            else:
                stall += 1
                if stall >= n_iter_no_change:
                    break
        return self

    def scores(self, X) -> np.ndarray:
        return _forward(X, self.weights, self.biases)[-1][:, 0]


def fit_minmax(X: np.ndarray):
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    span[span == 0.0] = 1.0  # constant columns map to 0
    return lo, span


def apply_minmax(X, lo, span):
    return (X - lo) / span
