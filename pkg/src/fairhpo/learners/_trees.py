"""Thin glue over the tree kernels: a Tree value object plus growers that
normalize dtypes/layout before handing off to the selected backend."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fairhpo import _core


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        return _core.tree_apply(self.feature, self.threshold, self.left,
                                self.right, self.value, X)

    @property
    def n_nodes(self) -> int:
        return self.feature.size


def grow_gini(X, y, max_depth: int, min_split: int, min_leaf: int,
              n_feat_split: int, seed: int) -> Tree:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    out = _core.grow_tree_gini(X, y, int(max_depth), int(min_split),
                               int(min_leaf), int(n_feat_split), int(seed))
    return Tree(*out)


def grow_newton(X, grad, hess, max_depth: int, reg_lambda: float) -> Tree:
    X = np.ascontiguousarray(X, dtype=np.float64)
    grad = np.ascontiguousarray(grad, dtype=np.float64)
    hess = np.ascontiguousarray(hess, dtype=np.float64)
    out = _core.grow_tree_newton(X, grad, hess, int(max_depth), float(reg_lambda))
    return Tree(*out)


def remap_features(tree: Tree, cols: np.ndarray) -> Tree:
    """Translate column-subset feature ids back to full-matrix ids."""
    feat = tree.feature.copy()
    mask = feat >= 0
    feat[mask] = cols[feat[mask]]
    return Tree(feat, tree.threshold, tree.left, tree.right, tree.value)
