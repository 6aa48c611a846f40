# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled level/slab sweep.

Same contract and output ordering as pysweep.sweep_quotient.  Keeps live
lists of active simplices and incidence pairs (bucketed add/remove events)
and runs a version-stamped union-find per level and per slab, so the total
work is proportional to the sum of activity-window lengths instead of
levels x simplices.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline Py_ssize_t uf_find(i64* parent, i64* size, i64* stamp,
                               i64 cur, Py_ssize_t x) nogil:
    cdef Py_ssize_t root
    if stamp[x] != cur:
        stamp[x] = cur
        parent[x] = x
        size[x] = 1
        return x
    root = x
    while parent[root] != root:
        parent[root] = parent[parent[root]]
        root = parent[root]
    return root


cdef inline void uf_union(i64* parent, i64* size, i64* stamp,
                          i64 cur, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t ra = uf_find(parent, size, stamp, cur, a)
    cdef Py_ssize_t rb = uf_find(parent, size, stamp, cur, b)
    if ra == rb:
        return
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] = size[ra] + size[rb]


def sweep_quotient(min_rank, max_rank, pair_a, pair_b, n_levels):
    cdef cnp.ndarray[i64, ndim=1] mn = np.ascontiguousarray(min_rank, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] mx = np.ascontiguousarray(max_rank, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pa = np.ascontiguousarray(pair_a, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pb = np.ascontiguousarray(pair_b, dtype=np.int64)
    cdef Py_ssize_t m = mn.shape[0]
    cdef Py_ssize_t p = pa.shape[0]
    cdef Py_ssize_t k = int(n_levels)
    cdef Py_ssize_t i, t, j, e, s, root, n_live, n_plive, cnt, lbl

    # pair windows = intersection of endpoint windows
    cdef cnp.ndarray[i64, ndim=1] plo = np.empty(p, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] phi = np.empty(p, dtype=np.int64)
    for e in range(p):
        plo[e] = mn[pa[e]] if mn[pa[e]] > mn[pb[e]] else mn[pb[e]]
        phi[e] = mx[pa[e]] if mx[pa[e]] < mx[pb[e]] else mx[pb[e]]

    # bucket simplices by min rank (additions) and max rank (removals),
    # pairs likewise; CSR-style offsets
    cdef cnp.ndarray[i64, ndim=1] s_add_off = np.zeros(k + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] s_rem_off = np.zeros(k + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] p_add_off = np.zeros(k + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] p_rem_off = np.zeros(k + 1, dtype=np.int64)
    for i in range(m):
        s_add_off[mn[i] + 1] += 1
        s_rem_off[mx[i] + 1] += 1
    for e in range(p):
        p_add_off[plo[e] + 1] += 1
        p_rem_off[phi[e] + 1] += 1
    for t in range(k):
        s_add_off[t + 1] += s_add_off[t]
        s_rem_off[t + 1] += s_rem_off[t]
        p_add_off[t + 1] += p_add_off[t]
        p_rem_off[t + 1] += p_rem_off[t]
    cdef cnp.ndarray[i64, ndim=1] s_add = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] s_rem = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] p_add = np.empty(p, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] p_rem = np.empty(p, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] cur_s = s_add_off.copy()
    cdef cnp.ndarray[i64, ndim=1] cur_r = s_rem_off.copy()
    cdef cnp.ndarray[i64, ndim=1] cur_pa = p_add_off.copy()
    cdef cnp.ndarray[i64, ndim=1] cur_pr = p_rem_off.copy()
    for i in range(m):
        s_add[cur_s[mn[i]]] = i
        cur_s[mn[i]] += 1
        s_rem[cur_r[mx[i]]] = i
        cur_r[mx[i]] += 1
    for e in range(p):
        p_add[cur_pa[plo[e]]] = e
        cur_pa[plo[e]] += 1
        p_rem[cur_pr[phi[e]]] = e
        cur_pr[phi[e]] += 1

    # live lists with swap removal
    cdef cnp.ndarray[i64, ndim=1] live_s = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pos_s = np.full(m, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] live_p = np.empty(p, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pos_p = np.full(p, -1, dtype=np.int64)

    cdef cnp.ndarray[i64, ndim=1] parent = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] size = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] stamp = np.full(m, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] comp_label = np.full(m, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] label_stamp = np.full(m, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] glob = np.full(m, -1, dtype=np.int64)

    cdef i64* parent_p = <i64*> cnp.PyArray_DATA(parent)
    cdef i64* size_p = <i64*> cnp.PyArray_DATA(size)
    cdef i64* stamp_p = <i64*> cnp.PyArray_DATA(stamp)

    node_level, node_rep = [], []
    arc_bottom, arc_top, arc_rep = [], [], []
    pending = []
    cdef i64 total = 0
    cdef cnp.ndarray[i64, ndim=1] act

    for t in range(k):
        # removals first (simplices whose window ended at t-1), then additions
        if t > 0:
            for j in range(s_rem_off[t - 1], s_rem_off[t]):
                i = s_rem[j]
                s = pos_s[i]
                n_live -= 1
                live_s[s] = live_s[n_live]
                pos_s[live_s[s]] = s
                pos_s[i] = -1
            for j in range(p_rem_off[t - 1], p_rem_off[t]):
                e = p_rem[j]
                s = pos_p[e]
                n_plive -= 1
                live_p[s] = live_p[n_plive]
                pos_p[live_p[s]] = s
                pos_p[e] = -1
        else:
            n_live = 0
            n_plive = 0
        for j in range(s_add_off[t], s_add_off[t + 1]):
            i = s_add[j]
            live_s[n_live] = i
            pos_s[i] = n_live
            n_live += 1
        for j in range(p_add_off[t], p_add_off[t + 1]):
            e = p_add[j]
            live_p[n_plive] = e
            pos_p[e] = n_plive
            n_plive += 1

        # level components, stamp 2t
        for j in range(n_plive):
            e = live_p[j]
            uf_union(parent_p, size_p, stamp_p, 2 * t, pa[e], pb[e])
        act = np.sort(live_s[:n_live])
        cnt = 0
        for j in range(act.shape[0]):
            i = act[j]
            root = uf_find(parent_p, size_p, stamp_p, 2 * t, i)
            if label_stamp[root] != 2 * t:
                label_stamp[root] = 2 * t
                comp_label[root] = cnt
                node_level.append(t)
                node_rep.append(i)
                cnt += 1
            glob[i] = total + comp_label[root]
        total += cnt

        for e in pending:
            arc_top[e] = glob[arc_rep[e]]
        pending = []

        # slab components, stamp 2t+1: simplices and pairs also live at t+1
        if t + 1 < k:
            for j in range(n_plive):
                e = live_p[j]
                if phi[e] >= t + 1:
                    uf_union(parent_p, size_p, stamp_p, 2 * t + 1, pa[e], pb[e])
            cnt = 0
            for j in range(act.shape[0]):
                i = act[j]
                if mx[i] < t + 1:
                    continue
                root = uf_find(parent_p, size_p, stamp_p, 2 * t + 1, i)
                if label_stamp[root] != 2 * t + 1:
                    label_stamp[root] = 2 * t + 1
                    arc_bottom.append(glob[i])
                    arc_top.append(-1)
                    arc_rep.append(i)
                    pending.append(len(arc_rep) - 1)
                    cnt += 1

    return (
        np.array(node_level, dtype=np.int64),
        np.array(node_rep, dtype=np.int64),
        np.array(arc_bottom, dtype=np.int64),
        np.array(arc_top, dtype=np.int64),
        np.array(arc_rep, dtype=np.int64),
    )
