"""Pure NumPy tree-growing kernels.

Fallback used when the compiled extension is unavailable (or forced via
EMOWEAR_PURE_PYTHON=1). Both backends implement the same contract with
identical floating-point semantics, so they grow bit-identical trees:

- node target sums accumulate sequentially over samples in ascending row
  order (np.cumsum is a sequential accumulation, matching the C loop);
- per-feature scans accumulate prefix sums in stable value order, ties
  broken by ascending row index;
- split gains use the same expression shapes as the compiled kernel;
- ties between candidate splits go to the lowest feature index, then the
  lowest threshold (first strict improvement wins).

Inputs must be finite; NaNs would order differently in the two backends.

Trees are returned as flat parallel arrays:

    feature   int32, -1 for leaves
    threshold float64, split point (x <= threshold goes left)
    left      int32 child index, -1 for leaves
    right     int32 child index, -1 for leaves
    value     float64 node mean target
    n_node    int32 samples reaching the node
    gain      float64 impurity gain of the node's split (0 for leaves)
"""

from __future__ import annotations

import numpy as np

CRITERION_SQUARED_ERROR = 0
CRITERION_FRIEDMAN_MSE = 1


def _seq_sum(a: np.ndarray) -> float:
    # np.cumsum accumulates left to right; its last entry equals the
    # sequential sum the compiled kernel computes.
    return float(np.cumsum(a)[-1])


def grow_tree(X, y, criterion=CRITERION_SQUARED_ERROR, max_depth=-1):
    """Grow a CART regression tree to purity or single-sample leaves.

    max_depth < 0 means unlimited. Returns the flat-array tuple described
    in the module docstring.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, d = X.shape

    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    value = np.zeros(cap, dtype=np.float64)
    n_node = np.zeros(cap, dtype=np.int32)
    gain = np.zeros(cap, dtype=np.float64)

    idx = np.arange(n, dtype=np.intp)
    node_count = 1
    stack = [(0, 0, n, 0)]

    while stack:
        nid, lo, hi, depth = stack.pop()
        seg = idx[lo:hi]
        ys = y[seg]
        m = hi - lo

        s_tot = _seq_sum(ys)
        value[nid] = s_tot / m
        n_node[nid] = m

        if m < 2 or (0 <= max_depth <= depth) or bool(np.all(ys == ys[0])):
            continue

        q_tot = _seq_sum(ys * ys)
        sse_parent = q_tot - (s_tot * s_tot) / m

        best_gain = 0.0
        best_feat = -1
        best_thr = 0.0

        for j in range(d):
            xcol = X[seg, j]
            order = np.argsort(xcol, kind="stable")
            xs = xcol[order]
            yo = ys[order]

            distinct = xs[1:] > xs[:-1]
            if not distinct.any():
                continue
            pos = np.nonzero(distinct)[0] + 1  # left child takes xs[:pos]

            c_s = np.cumsum(yo)
            n_l = pos.astype(np.float64)
            n_r = float(m) - n_l
            s_l = c_s[pos - 1]
            if criterion == CRITERION_SQUARED_ERROR:
                c_q = np.cumsum(yo * yo)
                q_l = c_q[pos - 1]
                sse_l = q_l - (s_l * s_l) / n_l
                s_r = s_tot - s_l
                sse_r = (q_tot - q_l) - (s_r * s_r) / n_r
                gains = sse_parent - sse_l - sse_r
            else:
                mean_l = s_l / n_l
                mean_r = (s_tot - s_l) / n_r
                diff = mean_l - mean_r
                w = (n_l * n_r) / (n_l + n_r)
                gains = w * (diff * diff)

            # NaN gains (possible only under overflow) are never accepted;
            # mapping them to -inf mirrors the compiled kernel's scan.
            gains = np.where(np.isnan(gains), -np.inf, gains)
            k = int(np.argmax(gains))
            g = float(gains[k])
            if g > best_gain:
                p = int(pos[k])
                thr = (xs[p - 1] + xs[p]) / 2.0
                if thr == xs[p]:
                    thr = xs[p - 1]
                best_gain = g
                best_feat = j
                best_thr = thr

        if best_feat < 0:
            continue

        mask = X[seg, best_feat] <= best_thr
        m_l = int(np.count_nonzero(mask))
        # Stable in-place partition keeps ascending row order in both halves.
        idx[lo:hi] = np.concatenate([seg[mask], seg[~mask]])

        lid, rid = node_count, node_count + 1
        node_count += 2
        feature[nid] = best_feat
        threshold[nid] = best_thr
        left[nid] = lid
        right[nid] = rid
        gain[nid] = best_gain
        stack.append((rid, lo + m_l, hi, depth + 1))
        stack.append((lid, lo, lo + m_l, depth + 1))

    sl = slice(0, node_count)
    return (
        feature[sl].copy(),
        threshold[sl].copy(),
        left[sl].copy(),
        right[sl].copy(),
        value[sl].copy(),
        n_node[sl].copy(),
        gain[sl].copy(),
    )


def apply_tree(tree, X):
    """Route rows of X down the tree; returns the leaf value per row."""
    feature, threshold, left, right, value = tree[0], tree[1], tree[2], tree[3], tree[4]
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    while True:
        f = feature[node]
        active = f >= 0
        if not active.any():
            break
        rows = np.nonzero(active)[0]
        cur = node[rows]
        go_left = X[rows, feature[cur]] <= threshold[cur]
        node[rows] = np.where(go_left, left[cur], right[cur])
    return value[node]
