# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tree-growing kernels: exact greedy CART splits for gini
classification trees and Newton-gain boosting trees, plus tree traversal.

The pure-NumPy twin lives in fallback.py. Both consume randomness from the
same splitmix64 stream and perform float arithmetic in the same order, so a
given (data, seed) produces bit-identical trees on either backend.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

ctypedef struct ValIdx:
    double v
    long long i


cdef int _cmp_validx(const void* a, const void* b) noexcept nogil:
    # total order on (value, row id) so ties never depend on qsort internals
    cdef const ValIdx* x = <const ValIdx*> a
    cdef const ValIdx* y = <const ValIdx*> b
    if x.v < y.v:
        return -1
    if x.v > y.v:
        return 1
    if x.i < y.i:
        return -1
    if x.i > y.i:
        return 1
    return 0


cdef inline unsigned long long _mix64(unsigned long long* state) noexcept nogil:
    cdef unsigned long long z
    state[0] = state[0] + (<unsigned long long> 0x9E3779B97F4A7C15ULL)
    z = state[0]
    z = (z ^ (z >> 30)) * (<unsigned long long> 0xBF58476D1CE4E5B9ULL)
    z = (z ^ (z >> 27)) * (<unsigned long long> 0x94D049BB133111EBULL)
    return z ^ (z >> 31)


def grow_tree_gini(const double[:, ::1] X, const long long[::1] y,
                   long long max_depth, long long min_split, long long min_leaf,
                   long long n_feat_split, unsigned long long seed):
    """Grow a binary gini CART tree on (X, y) with per-split feature subsets.

    Returns (feature, threshold, left, right, value) arrays; feature == -1
    marks a leaf and value holds the positive-class fraction of the node.
    """
    cdef long long m = X.shape[0]
    cdef long long f = X.shape[1]
    cdef long long cap = 2 * m + 1

    feature_arr = np.full(cap, -1, dtype=np.int32)
    threshold_arr = np.zeros(cap, dtype=np.float64)
    left_arr = np.full(cap, -1, dtype=np.int32)
    right_arr = np.full(cap, -1, dtype=np.int32)
    value_arr = np.zeros(cap, dtype=np.float64)
    samples_arr = np.arange(m, dtype=np.int64)

    cdef int[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef int[::1] left = left_arr
    cdef int[::1] right = right_arr
    cdef double[::1] value = value_arr
    cdef long long[::1] samples = samples_arr

    cdef long long* stack = <long long*> malloc(3 * (2 * m + 2) * sizeof(long long))
    cdef long long* pool = <long long*> malloc(f * sizeof(long long))
    cdef long long* subset = <long long*> malloc(f * sizeof(long long))
    cdef ValIdx* buf = <ValIdx*> malloc(m * sizeof(ValIdx))
    if stack == NULL or pool == NULL or subset == NULL or buf == NULL:
        free(stack); free(pool); free(subset); free(buf)
        raise MemoryError()

    cdef unsigned long long rng_state = seed
    cdef long long n_nodes = 1
    cdef long long top = 0
    cdef long long node, start, end, depth, s, p, q, c1, k, j, tmp
    cdef long long feat, nl, nr, best_nl, cl1, cl0, cr1, cr0
    cdef double sf, c1f, c0f, gp, gl, gr, gain, best_gain, best_thr
    cdef double nlf, nrf, cl1f, cl0f, cr1f, cr0f, vlo, vhi
    cdef long long best_feat, left_id, right_id

    # stack entries: (node, start, end, depth); depth packed with node
    stack[0] = 0; stack[1] = m; stack[2] = 0  # start, end, depth for node 0
    cdef long long* node_stack = <long long*> malloc((2 * m + 2) * sizeof(long long))
    if node_stack == NULL:
        free(stack); free(pool); free(subset); free(buf)
        raise MemoryError()
    node_stack[0] = 0
    top = 1

    with nogil:
        while top > 0:
            top -= 1
            node = node_stack[top]
            start = stack[3 * top]
            end = stack[3 * top + 1]
            depth = stack[3 * top + 2]
            s = end - start

            c1 = 0
            for p in range(start, end):
                c1 += y[samples[p]]
            sf = <double> s
            c1f = <double> c1
            value[node] = c1f / sf

            if depth >= max_depth or s < min_split or c1 == 0 or c1 == s:
                continue

            # per-split feature subset: partial Fisher-Yates on the splitmix64
            # stream, then ascending order so ties pick the lowest feature id
            for j in range(f):
                pool[j] = j
            k = n_feat_split
            if k > f:
                k = f
            for j in range(k):
                q = j + <long long> (_mix64(&rng_state) % (<unsigned long long> (f - j)))
                tmp = pool[j]; pool[j] = pool[q]; pool[q] = tmp
                subset[j] = pool[j]
            for j in range(1, k):
                tmp = subset[j]
                q = j - 1
                while q >= 0 and subset[q] > tmp:
                    subset[q + 1] = subset[q]
                    q -= 1
                subset[q + 1] = tmp

            c0f = sf - c1f
            gp = 1.0 - (c1f * c1f + c0f * c0f) / (sf * sf)
            best_gain = -1.0
            best_feat = -1
            best_thr = 0.0
            best_nl = 0

            for j in range(k):
                feat = subset[j]
                for p in range(s):
                    buf[p].v = X[samples[start + p], feat]
                    buf[p].i = samples[start + p]
                qsort(buf, s, sizeof(ValIdx), _cmp_validx)
                if buf[0].v == buf[s - 1].v:
                    continue
                cl1 = 0
                for p in range(s - 1):
                    cl1 += y[buf[p].i]
                    nl = p + 1
                    vlo = buf[p].v
                    vhi = buf[p + 1].v
                    if vlo == vhi or nl < min_leaf or s - nl < min_leaf:
                        continue
                    nr = s - nl
                    cl0 = nl - cl1
                    cr1 = c1 - cl1
                    cr0 = nr - cr1
                    nlf = <double> nl
                    nrf = <double> nr
                    cl1f = <double> cl1
                    cl0f = <double> cl0
                    cr1f = <double> cr1
                    cr0f = <double> cr0
                    gl = 1.0 - (cl1f * cl1f + cl0f * cl0f) / (nlf * nlf)
                    gr = 1.0 - (cr1f * cr1f + cr0f * cr0f) / (nrf * nrf)
                    gain = gp - (nlf * gl + nrf * gr) / sf
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = feat
                        best_thr = (vlo + vhi) / 2.0
                        best_nl = nl

            if best_feat < 0:
                continue

            # re-sort by the winning feature and partition the segment in place
            for p in range(s):
                buf[p].v = X[samples[start + p], best_feat]
                buf[p].i = samples[start + p]
            qsort(buf, s, sizeof(ValIdx), _cmp_validx)
            for p in range(s):
                samples[start + p] = buf[p].i

            left_id = n_nodes
            right_id = n_nodes + 1
            n_nodes += 2
            feature[node] = <int> best_feat
            threshold[node] = best_thr
            left[node] = <int> left_id
            right[node] = <int> right_id

            node_stack[top] = right_id
            stack[3 * top] = start + best_nl
            stack[3 * top + 1] = end
            stack[3 * top + 2] = depth + 1
            top += 1
            node_stack[top] = left_id
            stack[3 * top] = start
            stack[3 * top + 1] = start + best_nl
            stack[3 * top + 2] = depth + 1
            top += 1

    free(stack); free(node_stack); free(pool); free(subset); free(buf)
    return (feature_arr[:n_nodes].copy(), threshold_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            value_arr[:n_nodes].copy())


def grow_tree_newton(const double[:, ::1] X, const double[::1] grad, const double[::1] hess,
                     long long max_depth, double reg_lambda):
    """Grow a boosting tree: split on Newton gain, leaf weight -G/(H+lambda).

    All columns of X are candidates at every split (column subsampling is
    applied per tree by the caller). Splits require strictly positive gain.
    """
    cdef long long m = X.shape[0]
    cdef long long f = X.shape[1]
    cdef long long cap = 2 * m + 1

    feature_arr = np.full(cap, -1, dtype=np.int32)
    threshold_arr = np.zeros(cap, dtype=np.float64)
    left_arr = np.full(cap, -1, dtype=np.int32)
    right_arr = np.full(cap, -1, dtype=np.int32)
    value_arr = np.zeros(cap, dtype=np.float64)
    samples_arr = np.arange(m, dtype=np.int64)

    cdef int[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef int[::1] left = left_arr
    cdef int[::1] right = right_arr
    cdef double[::1] value = value_arr
    cdef long long[::1] samples = samples_arr

    cdef long long* stack = <long long*> malloc(3 * (2 * m + 2) * sizeof(long long))
    cdef long long* node_stack = <long long*> malloc((2 * m + 2) * sizeof(long long))
    cdef ValIdx* buf = <ValIdx*> malloc(m * sizeof(ValIdx))
    if stack == NULL or node_stack == NULL or buf == NULL:
        free(stack); free(node_stack); free(buf)
        raise MemoryError()

    cdef long long n_nodes = 1
    cdef long long top = 1
    cdef long long node, start, end, depth, s, p, feat, nl, best_nl
    cdef double gt, ht, gl_acc, hl_acc, gr, hr, parent, gain, best_gain, best_thr
    cdef double vlo, vhi
    cdef long long best_feat, left_id, right_id

    node_stack[0] = 0
    stack[0] = 0; stack[1] = m; stack[2] = 0

    with nogil:
        while top > 0:
            top -= 1
            node = node_stack[top]
            start = stack[3 * top]
            end = stack[3 * top + 1]
            depth = stack[3 * top + 2]
            s = end - start

            gt = 0.0
            ht = 0.0
            for p in range(start, end):
                gt += grad[samples[p]]
                ht += hess[samples[p]]
            value[node] = -gt / (ht + reg_lambda)

            if depth >= max_depth or s < 2:
                continue

            parent = gt * gt / (ht + reg_lambda)
            best_gain = 0.0
            best_feat = -1
            best_thr = 0.0
            best_nl = 0

            for feat in range(f):
                for p in range(s):
                    buf[p].v = X[samples[start + p], feat]
                    buf[p].i = samples[start + p]
                qsort(buf, s, sizeof(ValIdx), _cmp_validx)
                if buf[0].v == buf[s - 1].v:
                    continue
                gl_acc = 0.0
                hl_acc = 0.0
                for p in range(s - 1):
                    gl_acc += grad[buf[p].i]
                    hl_acc += hess[buf[p].i]
                    vlo = buf[p].v
                    vhi = buf[p + 1].v
                    if vlo == vhi:
                        continue
                    nl = p + 1
                    gr = gt - gl_acc
                    hr = ht - hl_acc
                    gain = 0.5 * (gl_acc * gl_acc / (hl_acc + reg_lambda)
                                  + gr * gr / (hr + reg_lambda) - parent)
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = feat
                        best_thr = (vlo + vhi) / 2.0
                        best_nl = nl

            if best_feat < 0:
                continue

            for p in range(s):
                buf[p].v = X[samples[start + p], best_feat]
                buf[p].i = samples[start + p]
            qsort(buf, s, sizeof(ValIdx), _cmp_validx)
            for p in range(s):
                samples[start + p] = buf[p].i

            left_id = n_nodes
            right_id = n_nodes + 1
            n_nodes += 2
            feature[node] = <int> best_feat
            threshold[node] = best_thr
            left[node] = <int> left_id
            right[node] = <int> right_id

            node_stack[top] = right_id
            stack[3 * top] = start + best_nl
            stack[3 * top + 1] = end
            stack[3 * top + 2] = depth + 1
            top += 1
            node_stack[top] = left_id
            stack[3 * top] = start
            stack[3 * top + 1] = start + best_nl
            stack[3 * top + 2] = depth + 1
            top += 1

    free(stack); free(node_stack); free(buf)
    return (feature_arr[:n_nodes].copy(), threshold_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            value_arr[:n_nodes].copy())


def tree_apply(const int[::1] feature, const double[::1] threshold, const int[::1] left,
               const int[::1] right, const double[::1] value, const double[:, ::1] X):
    """Route rows of X through the tree; returns the leaf value per row."""
    cdef long long m = X.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef long long i
    cdef int node
    with nogil:
        for i in range(m):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[i] = value[node]
    return out_arr
