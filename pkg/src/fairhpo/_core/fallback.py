"""Pure-NumPy twin of the compiled kernels.

Same splitmix64 stream, same node-expansion order, same float expression
order as kernels.pyx, so trees grown here are bit-identical to the compiled
backend for the same inputs. Slower; selected only when the extension is
missing or FAIRHPO_PURE_PYTHON is set.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


class _SplitMix64:
    """splitmix64 stream; mirrors the C implementation exactly."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def _feature_subset(rng: _SplitMix64, n_features: int, k: int) -> list[int]:
    # partial Fisher-Yates, then ascending so ties pick the lowest feature id
    pool = list(range(n_features))
    k = min(k, n_features)
    subset = []
    for j in range(k):
        q = j + rng.next() % (n_features - j)
        pool[j], pool[q] = pool[q], pool[j]
        subset.append(pool[j])
    return sorted(subset)


def _sorted_segment(col: np.ndarray, rows: np.ndarray) -> np.ndarray:
    # total order on (value, row id), matching the C comparator
    order = np.lexsort((rows, col))
    return rows[order]


class _TreeArrays:
    __slots__ = ("feature", "threshold", "left", "right", "value", "n_nodes")

    def __init__(self, cap: int):
        self.feature = np.full(cap, -1, dtype=np.int32)
        self.threshold = np.zeros(cap, dtype=np.float64)
        self.left = np.full(cap, -1, dtype=np.int32)
        self.right = np.full(cap, -1, dtype=np.int32)
        self.value = np.zeros(cap, dtype=np.float64)
        self.n_nodes = 1

    def emit(self):
        n = self.n_nodes
        return (self.feature[:n].copy(), self.threshold[:n].copy(),
                self.left[:n].copy(), self.right[:n].copy(),
                self.value[:n].copy())


def grow_tree_gini(X, y, max_depth, min_split, min_leaf, n_feat_split, seed):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    m, f = X.shape
    tree = _TreeArrays(2 * m + 1)
    rng = _SplitMix64(seed)
    samples = np.arange(m, dtype=np.int64)
    stack = [(0, 0, m, 0)]  # node, start, end, depth

    while stack:
        node, start, end, depth = stack.pop()
        seg = samples[start:end]
        s = end - start
        c1 = int(np.cumsum(y[seg])[-1]) if s else 0
        sf = float(s)
        c1f = float(c1)
        tree.value[node] = c1f / sf

        if depth >= max_depth or s < min_split or c1 == 0 or c1 == s:
            continue

        subset = _feature_subset(rng, f, n_feat_split)
        c0f = sf - c1f
        gp = 1.0 - (c1f * c1f + c0f * c0f) / (sf * sf)
        best_gain = -1.0
        best_feat = -1
        best_thr = 0.0
        best_nl = 0

        for feat in subset:
            srows = _sorted_segment(X[seg, feat], seg)
            vals = X[srows, feat]
            if vals[0] == vals[-1]:
                continue
            cl1 = np.cumsum(y[srows])[:-1].astype(np.float64)
            nl = np.arange(1, s, dtype=np.float64)
            nr = sf - nl
            cl0 = nl - cl1
            cr1 = c1f - cl1
            cr0 = nr - cr1
            gl = 1.0 - (cl1 * cl1 + cl0 * cl0) / (nl * nl)
            gr = 1.0 - (cr1 * cr1 + cr0 * cr0) / (nr * nr)
            gain = gp - (nl * gl + nr * gr) / sf
            valid = (vals[1:] != vals[:-1]) & (nl >= min_leaf) & (nr >= min_leaf)
            cand = np.flatnonzero(valid)
            if cand.size == 0:
                continue
            j = cand[np.argmax(gain[cand])]
            if gain[j] > best_gain:
                best_gain = float(gain[j])
                best_feat = feat
                best_thr = (float(vals[j]) + float(vals[j + 1])) / 2.0
                best_nl = int(j) + 1

        if best_feat < 0:
            continue

        srows = _sorted_segment(X[seg, best_feat], seg)
        samples[start:end] = srows
        left_id = tree.n_nodes
        right_id = tree.n_nodes + 1
        tree.n_nodes += 2
        tree.feature[node] = best_feat
        tree.threshold[node] = best_thr
        tree.left[node] = left_id
        tree.right[node] = right_id
        stack.append((right_id, start + best_nl, end, depth + 1))
        stack.append((left_id, start, start + best_nl, depth + 1))

    return tree.emit()


def grow_tree_newton(X, grad, hess, max_depth, reg_lambda):
    X = np.ascontiguousarray(X, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    hess = np.asarray(hess, dtype=np.float64)
    m, f = X.shape
    tree = _TreeArrays(2 * m + 1)
    samples = np.arange(m, dtype=np.int64)
    stack = [(0, 0, m, 0)]

    while stack:
        node, start, end, depth = stack.pop()
        seg = samples[start:end]
        s = end - start
        gt = float(np.cumsum(grad[seg])[-1])
        ht = float(np.cumsum(hess[seg])[-1])
        tree.value[node] = -gt / (ht + reg_lambda)

        if depth >= max_depth or s < 2:
            continue

        parent = gt * gt / (ht + reg_lambda)
        best_gain = 0.0
        best_feat = -1
        best_thr = 0.0
        best_nl = 0

        for feat in range(f):
            srows = _sorted_segment(X[seg, feat], seg)
            vals = X[srows, feat]
            if vals[0] == vals[-1]:
                continue
            gl = np.cumsum(grad[srows])[:-1]
            hl = np.cumsum(hess[srows])[:-1]
            gr = gt - gl
            hr = ht - hl
            gain = 0.5 * (gl * gl / (hl + reg_lambda)
                          + gr * gr / (hr + reg_lambda) - parent)
            valid = vals[1:] != vals[:-1]
            cand = np.flatnonzero(valid)
            if cand.size == 0:
                continue
            j = cand[np.argmax(gain[cand])]
            if gain[j] > best_gain:
                best_gain = float(gain[j])
                best_feat = feat
                best_thr = (float(vals[j]) + float(vals[j + 1])) / 2.0
                best_nl = int(j) + 1

        if best_feat < 0:
            continue

        srows = _sorted_segment(X[seg, best_feat], seg)
        samples[start:end] = srows
        left_id = tree.n_nodes
        right_id = tree.n_nodes + 1
        tree.n_nodes += 2
        tree.feature[node] = best_feat
        tree.threshold[node] = best_thr
        tree.left[node] = left_id
        tree.right[node] = right_id
        stack.append((right_id, start + best_nl, end, depth + 1))
        stack.append((left_id, start, start + best_nl, depth + 1))

    return tree.emit()


def tree_apply(feature, threshold, left, right, value, X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    m = X.shape[0]
    node = np.zeros(m, dtype=np.int32)
    rows = np.arange(m)
    while True:
        feat = feature[node]
        internal = feat >= 0
        if not internal.any():
            break
        idx = rows[internal]
        nd = node[internal]
        go_left = X[idx, feature[nd]] <= threshold[nd]
        node[internal] = np.where(go_left, left[nd], right[nd])
    return value[node].astype(np.float64)
