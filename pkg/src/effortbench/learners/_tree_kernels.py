"""Numba kernels for regression tree growth and traversal.

All randomness (bootstrap rows, per-node candidate features) is drawn by the
caller and passed in as arrays, so the kernels are pure functions of their
inputs and stay bit-deterministic.  A whole forest is grown in one call:
per-tree Python overhead would otherwise dominate at benchmark scale.

Growth uses the presort-and-partition scheme: each feature's row order is
sorted once per tree, then split scans are linear and every list is stably
partitioned when a node splits.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def grow_forest(X, y, boots, min_leaf, max_depth, subsets):
    """Grow len(boots) SSE-reduction regression trees.

    X: (n, d) feature matrix; boots: (T, n) row ids per tree (a bootstrap
    sample or just arange); subsets: (T, max_nodes, mtry) candidate feature
    ids per construction-order node, each row ascending.  max_depth < 0 means
    unlimited.  Rows go left when value <= threshold (midpoints between
    consecutive distinct sorted values); ties in SSE reduction resolve to the
    lower feature index, then the lower threshold.

    Returns (feature, threshold, left, right, value, n_nodes) with one row
    per tree; leaves have feature == -1.
    """
    T, n = boots.shape
    d = X.shape[1]
    max_nodes = 2 * n + 1

    feature = np.full((T, max_nodes), -1, np.int64)
    threshold = np.zeros((T, max_nodes))
    left = np.full((T, max_nodes), -1, np.int64)
    right = np.full((T, max_nodes), -1, np.int64)
    value = np.zeros((T, max_nodes))
    n_nodes = np.empty(T, np.int64)

    Xb = np.empty((n, d))
    yb = np.empty(n)
    slists = np.empty((d, n), np.int64)  # per-feature row ids in sorted order
    goes_left = np.empty(n, np.uint8)
    buf_l = np.empty(n, np.int64)
    buf_r = np.empty(n, np.int64)
    stack_node = np.empty(max_nodes, np.int64)
    stack_lo = np.empty(max_nodes, np.int64)
    stack_hi = np.empty(max_nodes, np.int64)
    stack_depth = np.empty(max_nodes, np.int64)

    for t in range(T):
        for i in range(n):
            r = boots[t, i]
            for f in range(d):
                Xb[i, f] = X[r, f]
            yb[i] = y[r]
        for f in range(d):
            slists[f, :] = np.argsort(Xb[:, f])

        top = 0
        stack_node[0], stack_lo[0], stack_hi[0], stack_depth[0] = 0, 0, n, 0
        top = 1
        count = 1

        while top > 0:
            top -= 1
            node = stack_node[top]
            lo = stack_lo[top]
            hi = stack_hi[top]
            depth = stack_depth[top]
            m = hi - lo

            ysum = 0.0
            for p in range(lo, hi):
                ysum += yb[slists[0, p]]
            mean = ysum / m
            value[t, node] = mean
            if m < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
                continue
            node_sse = 0.0
            for p in range(lo, hi):
                dlt = yb[slists[0, p]] - mean
                node_sse += dlt * dlt
            if node_sse <= 0.0:
                continue

            best_gain = 0.0
            best_f = -1
            best_thr = 0.0
            subset = subsets[t, node]
            for si in range(subset.shape[0]):
                f = subset[si]
                lsum = 0.0
                for k in range(1, m):
                    row = slists[f, lo + k - 1]
                    lsum += yb[row]
                    va = Xb[row, f]
                    vb = Xb[slists[f, lo + k], f]
                    if va >= vb:
                        continue
                    if k < min_leaf or m - k < min_leaf:
                        continue
                    rsum = ysum - lsum
                    gain = lsum * lsum / k + rsum * rsum / (m - k) - ysum * ysum / m
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_thr = 0.5 * (va + vb)

            if best_f < 0 or best_gain <= 1e-12 * node_sse:
                continue

            nl = 0
            for p in range(lo, hi):
                row = slists[best_f, p]
                if Xb[row, best_f] <= best_thr:
                    goes_left[row] = 1
                    nl += 1
                else:
                    goes_left[row] = 0
            for f in range(d):
                a = 0
                b = 0
                for p in range(lo, hi):
                    row = slists[f, p]
                    if goes_left[row] == 1:
                        buf_l[a] = row
                        a += 1
                    else:
                        buf_r[b] = row
                        b += 1
                for p in range(a):
                    slists[f, lo + p] = buf_l[p]
                for p in range(b):
                    slists[f, lo + a + p] = buf_r[p]

            lchild = count
            rchild = count + 1
            count += 2
            feature[t, node] = best_f
            threshold[t, node] = best_thr
            left[t, node] = lchild
            right[t, node] = rchild
            stack_node[top], stack_lo[top], stack_hi[top], stack_depth[top] = (
                rchild, lo + nl, hi, depth + 1)
            top += 1
            stack_node[top], stack_lo[top], stack_hi[top], stack_depth[top] = (
                lchild, lo, lo + nl, depth + 1)
            top += 1

        n_nodes[t] = count

    return feature, threshold, left, right, value, n_nodes


@njit(cache=True)
def predict_forest(feature, threshold, left, right, value, X):
    """Mean prediction over all trees for every query row."""
    T = feature.shape[0]
    out = np.zeros(X.shape[0])
    for i in range(X.shape[0]):
        acc = 0.0
        for t in range(T):
            node = 0
            while feature[t, node] >= 0:
                if X[i, feature[t, node]] <= threshold[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            acc += value[t, node]
        out[i] = acc / T
    return out
