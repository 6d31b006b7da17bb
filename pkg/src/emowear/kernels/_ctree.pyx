# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree-growing kernels.

Mirrors emowear.kernels.pure operation for operation: node sums accumulate
sequentially in ascending row order, per-feature scans accumulate prefix
sums in stable value order (ties by row position), and gains use the same
expression shapes. Given finite inputs, both backends grow bit-identical
trees. See the pure module for the array layout contract.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

CRITERION_SQUARED_ERROR = 0
CRITERION_FRIEDMAN_MSE = 1

cdef double NEG_INF = float("-inf")


cdef struct VP:
    double v
    Py_ssize_t i


cdef int _vp_cmp(const void* a, const void* b) noexcept nogil:
    # Orders by value, then by position: equals a stable sort by value.
    cdef const VP* pa = <const VP*> a
    cdef const VP* pb = <const VP*> b
    if pa.v < pb.v:
        return -1
    if pa.v > pb.v:
        return 1
    if pa.i < pb.i:
        return -1
    if pa.i > pb.i:
        return 1
    return 0


def grow_tree(X, y, int criterion=0, int max_depth=-1):
    """Grow a CART regression tree; same contract as the pure backend."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Xa = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] ya = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Xa.shape[0]
    cdef Py_ssize_t d = Xa.shape[1]
    if n < 1:
        raise ValueError("grow_tree needs at least one sample")

    cdef Py_ssize_t cap = 2 * n + 1
    cdef cnp.ndarray[cnp.int32_t, ndim=1] feature = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] threshold = np.zeros(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] left = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] right = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] value = np.zeros(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] n_node = np.zeros(cap, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gain = np.zeros(cap, dtype=np.float64)

    cdef double[:, ::1] Xv = Xa
    cdef double[::1] yv = ya
    cdef cnp.int32_t[::1] feat_v = feature
    cdef double[::1] thr_v = threshold
    cdef cnp.int32_t[::1] left_v = left
    cdef cnp.int32_t[::1] right_v = right
    cdef double[::1] val_v = value
    cdef cnp.int32_t[::1] nn_v = n_node
    cdef double[::1] gain_v = gain

    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* tmp = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef VP* vp = <VP*> malloc(n * sizeof(VP))
    # Stack entries: (node id, lo, hi, depth); one frame per node suffices.
    cdef Py_ssize_t* st_nid = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* st_lo = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* st_hi = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* st_dep = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    if idx is NULL or tmp is NULL or vp is NULL or st_nid is NULL \
            or st_lo is NULL or st_hi is NULL or st_dep is NULL:
        free(idx); free(tmp); free(vp)
        free(st_nid); free(st_lo); free(st_hi); free(st_dep)
        raise MemoryError()

    cdef Py_ssize_t node_count = 1
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t nid, lo, hi, depth, m, t, i, p, row, m_l, k
    cdef Py_ssize_t best_feat, feat_pos, j, lid, rid
    cdef double s_tot, q_tot, yval, y0, sse_parent
    cdef double s_l, q_l, s_r, n_l, n_r, sse_l, sse_r, mean_l, mean_r, diff, w, g
    cdef double best_gain, best_thr, feat_best, thr
    cdef bint is_pure

    try:
        for t in range(n):
            idx[t] = t
        st_nid[0] = 0; st_lo[0] = 0; st_hi[0] = n; st_dep[0] = 0
        top = 1

        while top > 0:
            top -= 1
            nid = st_nid[top]; lo = st_lo[top]; hi = st_hi[top]; depth = st_dep[top]
            m = hi - lo

            s_tot = 0.0
            for t in range(m):
                s_tot += yv[idx[lo + t]]
            val_v[nid] = s_tot / m
            nn_v[nid] = <cnp.int32_t> m

            if m < 2 or (max_depth >= 0 and depth >= max_depth):
                continue
            y0 = yv[idx[lo]]
            is_pure = True
            for t in range(1, m):
                if yv[idx[lo + t]] != y0:
                    is_pure = False
                    break
            if is_pure:
                continue

            q_tot = 0.0
            for t in range(m):
                yval = yv[idx[lo + t]]
                q_tot += yval * yval
            sse_parent = q_tot - (s_tot * s_tot) / m

            best_gain = 0.0
            best_feat = -1
            best_thr = 0.0

            for j in range(d):
                for t in range(m):
                    vp[t].v = Xv[idx[lo + t], j]
                    vp[t].i = t
                qsort(vp, m, sizeof(VP), _vp_cmp)

                feat_best = NEG_INF
                feat_pos = -1
                s_l = 0.0
                q_l = 0.0
                for i in range(1, m):
                    yval = yv[idx[lo + vp[i - 1].i]]
                    s_l += yval
                    q_l += yval * yval
                    if vp[i].v > vp[i - 1].v:
                        n_l = <double> i
                        n_r = <double> (m - i)
                        if criterion == 0:
                            sse_l = q_l - (s_l * s_l) / n_l
                            s_r = s_tot - s_l
                            sse_r = (q_tot - q_l) - (s_r * s_r) / n_r
                            g = sse_parent - sse_l - sse_r
                        else:
                            mean_l = s_l / n_l
                            mean_r = (s_tot - s_l) / n_r
                            diff = mean_l - mean_r
                            w = (n_l * n_r) / (n_l + n_r)
                            g = w * (diff * diff)
                        if g > feat_best:
                            feat_best = g
                            feat_pos = i

                if feat_pos >= 0 and feat_best > best_gain:
                    p = feat_pos
                    thr = (vp[p - 1].v + vp[p].v) / 2.0
                    if thr == vp[p].v:
                        thr = vp[p - 1].v
                    best_gain = feat_best
                    best_feat = j
                    best_thr = thr

            if best_feat < 0:
                continue

            # Stable partition: left block keeps ascending row order, then right.
            k = 0
            for t in range(m):
                row = idx[lo + t]
                if Xv[row, best_feat] <= best_thr:
                    tmp[k] = row
                    k += 1
            m_l = k
            for t in range(m):
                row = idx[lo + t]
                if not (Xv[row, best_feat] <= best_thr):
                    tmp[k] = row
                    k += 1
            for t in range(m):
                idx[lo + t] = tmp[t]

            lid = node_count
            rid = node_count + 1
            node_count += 2
            feat_v[nid] = <cnp.int32_t> best_feat
            thr_v[nid] = best_thr
            left_v[nid] = <cnp.int32_t> lid
            right_v[nid] = <cnp.int32_t> rid
            gain_v[nid] = best_gain

            st_nid[top] = rid; st_lo[top] = lo + m_l; st_hi[top] = hi; st_dep[top] = depth + 1
            top += 1
            st_nid[top] = lid; st_lo[top] = lo; st_hi[top] = lo + m_l; st_dep[top] = depth + 1
            top += 1
    finally:
        free(idx); free(tmp); free(vp)
        free(st_nid); free(st_lo); free(st_hi); free(st_dep)

    return (
        feature[:node_count].copy(),
        threshold[:node_count].copy(),
        left[:node_count].copy(),
        right[:node_count].copy(),
        value[:node_count].copy(),
        n_node[:node_count].copy(),
        gain[:node_count].copy(),
    )


def apply_tree(tree, X):
    """Route rows of X down the tree; returns the leaf value per row."""
    cdef cnp.ndarray[cnp.int32_t, ndim=1] feature = np.ascontiguousarray(tree[0], dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] threshold = np.ascontiguousarray(tree[1], dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] left = np.ascontiguousarray(tree[2], dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] right = np.ascontiguousarray(tree[3], dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] value = np.ascontiguousarray(tree[4], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Xa = np.ascontiguousarray(X, dtype=np.float64)

    cdef Py_ssize_t n = Xa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] Xv = Xa
    cdef cnp.int32_t[::1] feat_v = feature
    cdef double[::1] thr_v = threshold
    cdef cnp.int32_t[::1] left_v = left
    cdef cnp.int32_t[::1] right_v = right
    cdef double[::1] val_v = value
    cdef double[::1] out_v = out

    cdef Py_ssize_t r, node
    for r in range(n):
        node = 0
        while feat_v[node] >= 0:
            if Xv[r, feat_v[node]] <= thr_v[node]:
                node = left_v[node]
            else:
                node = right_v[node]
        out_v[r] = val_v[node]
    return out
