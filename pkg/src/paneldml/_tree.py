"""Compiled kernels for exact greedy regression trees.

The grower keeps, for every feature, the node's sample indices sorted by
that feature (presorted once, then stable-partitioned at each split), so a
split costs O(p * n_node). Ties in the split objective resolve to the
lowest feature index, then the lowest threshold.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def grow(X, y, order, max_depth, min_leaf, l2, feat, thr, left, right, value):
    n, p = X.shape
    stack = np.empty((2 * n + 2, 4), np.int64)
    stack[0, 0] = 0  # node id
    stack[0, 1] = 0  # segment start
    stack[0, 2] = n  # segment end
    stack[0, 3] = 0  # depth
    top = 1
    n_nodes = 1
    buf = np.empty(n, np.int64)
    is_left = np.zeros(n, np.bool_)
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        m = end - start
        s_tot = 0.0
        ymin = np.inf
        ymax = -np.inf
        for i in range(start, end):
            v = y[order[0, i]]
            s_tot += v
            if v < ymin:
                ymin = v
            if v > ymax:
                ymax = v
        value[node] = s_tot / (m + l2)
        feat[node] = -1
        if depth >= max_depth or m < 2 * min_leaf or ymin == ymax:
            continue
        # minimizing SSE == maximizing sum of (segment sum)^2 / count
        base = s_tot * s_tot / m
        best_gain = base
        best_j = -1
        best_t = 0.0
        best_pos = -1
        for j in range(p):
            s_left = 0.0
            for k in range(start, end - 1):
                idx = order[j, k]
                s_left += y[idx]
                nl = k - start + 1
                if nl < min_leaf:
                    continue
                if m - nl < min_leaf:
                    break
                x_lo = X[idx, j]
                x_hi = X[order[j, k + 1], j]
                if x_lo == x_hi:
                    continue
                s_right = s_tot - s_left
                gain = s_left * s_left / nl + s_right * s_right / (m - nl)
                if gain > best_gain:
                    best_gain = gain
                    best_j = j
                    t = 0.5 * (x_lo + x_hi)
                    if t >= x_hi:
                        t = x_lo  # midpoint rounded up; keep x <= t consistent
                    best_t = t
                    best_pos = nl
        if best_j < 0:
            continue
        for k in range(start, start + best_pos):
            is_left[order[best_j, k]] = True
        # stable partition of every feature's segment preserves sortedness
        for j in range(p):
            a = start
            b = 0
            for k in range(start, end):
                idx = order[j, k]
                if is_left[idx]:
                    order[j, a] = idx
                    a += 1
                else:
                    buf[b] = idx
                    b += 1
            order[j, start + best_pos:end] = buf[:b]
        for k in range(start, start + best_pos):
            is_left[order[best_j, k]] = False
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feat[node] = best_j
        thr[node] = best_t
        left[node] = lid
        right[node] = rid
        stack[top, 0] = lid
        stack[top, 1] = start
        stack[top, 2] = start + best_pos
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = rid
        stack[top, 1] = start + best_pos
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
    return n_nodes


@njit(cache=True, nogil=True)
def predict(X, feat, thr, left, right, value, out):
    for i in range(X.shape[0]):
        node = 0
        while feat[node] >= 0:
            if X[i, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]


def grow_tree(X, y, max_depth, min_leaf, l2=0.0, presort=None):
    """Fit one tree; returns (feat, thr, left, right, value) arrays.

    ``presort`` is the (p, n) per-feature argsort of X; pass it in when
    fitting many trees on the same X. Leaf values are
    sum(y_leaf) / (n_leaf + l2).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = X.shape[0]
    if presort is None:
        presort = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)
    order = presort.copy()
    cap = 2 * n + 2
    feat = np.empty(cap, np.int64)
    thr = np.empty(cap, np.float64)
    left = np.empty(cap, np.int64)
    right = np.empty(cap, np.int64)
    value = np.empty(cap, np.float64)
    n_nodes = grow(
        X, y, order, max_depth, min_leaf, float(l2), feat, thr, left, right, value
    )
    sl = slice(0, n_nodes)
    return (
        feat[sl].copy(),
        thr[sl].copy(),
        left[sl].copy(),
        right[sl].copy(),
        value[sl].copy(),
    )


def predict_tree(nodes, X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.float64)
    predict(X, *nodes, out)
    return out
