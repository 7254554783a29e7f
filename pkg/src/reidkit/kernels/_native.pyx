# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: LBP codes, segmentation merging, KD-tree queries.

Mirror of reidkit.kernels._py; both backends must return identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def lbp_codes(gray):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] g = np.ascontiguousarray(gray, dtype=np.float64)
    cdef Py_ssize_t h = g.shape[0], w = g.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h - 2, w - 2), dtype=np.uint8)
    # ring order starting East, counterclockwise; keep in sync with _py
    cdef int[8] dr = [0, -1, -1, -1, 0, 1, 1, 1]
    cdef int[8] dc = [1, 1, 0, -1, -1, -1, 0, 1]
    cdef Py_ssize_t r, c
    cdef int k
    cdef unsigned char code
    cdef double center
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            center = g[r, c]
            code = 0
            for k in range(8):
                if g[r + dr[k], c + dc[k]] >= center:
                    code |= <unsigned char> (1 << k)
            out[r - 1, c - 1] = code
    return out


cdef Py_ssize_t _find(cnp.int64_t* parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, tmp
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        tmp = parent[x]
        parent[x] = root
        x = tmp
    return root


def felz_segment(edge_a, edge_b, weight, Py_ssize_t n_vertices, double k_scale,
                 Py_ssize_t min_size):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ea = np.ascontiguousarray(edge_a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] eb = np.ascontiguousarray(edge_b, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ew = np.ascontiguousarray(weight, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent = np.arange(n_vertices, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] size = np.ones(n_vertices, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] thr = np.full(n_vertices, k_scale, dtype=np.float64)
    cdef cnp.int64_t* p = <cnp.int64_t*> parent.data
    cdef Py_ssize_t i, ra, rb, n_edges = ea.shape[0]
    cdef double w
    for i in range(n_edges):
        ra = _find(p, ea[i])
        rb = _find(p, eb[i])
        if ra == rb:
            continue
        w = ew[i]
        if w <= thr[ra] and w <= thr[rb]:
            parent[rb] = ra
            size[ra] += size[rb]
            thr[ra] = w + k_scale / size[ra]
    for i in range(n_edges):
        ra = _find(p, ea[i])
        rb = _find(p, eb[i])
        if ra != rb and (size[ra] < min_size or size[rb] < min_size):
            parent[rb] = ra
            size[ra] += size[rb]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] labels = np.empty(n_vertices, dtype=np.int32)
    for i in range(n_vertices):
        labels[i] = <cnp.int32_t> _find(p, i)
    return labels


cdef inline bint _worse(double d2a, cnp.int64_t ia, double d2b, cnp.int64_t ib) noexcept nogil:
    # (d2a, ia) > (d2b, ib) lexicographically
    if d2a != d2b:
        return d2a > d2b
    return ia > ib


def kd_query(points, perm, node_dim, node_split, node_left, node_right,
             node_start, node_end, query, Py_ssize_t k):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] prm = np.ascontiguousarray(perm, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ndim_ = np.ascontiguousarray(node_dim, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nsplit = np.ascontiguousarray(node_split, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] nleft = np.ascontiguousarray(node_left, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] nright = np.ascontiguousarray(node_right, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] nstart = np.ascontiguousarray(node_start, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] nend = np.ascontiguousarray(node_end, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.ascontiguousarray(query, dtype=np.float64)
    cdef Py_ssize_t dim = pts.shape[1]

    # max-heap on (d2, id): root = current worst of the k best
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hd2 = np.empty(k, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hid = np.empty(k, dtype=np.int64)
    cdef Py_ssize_t hsize = 0

    cdef Py_ssize_t max_nodes = ndim_.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] stack_node = np.empty(max_nodes + 2, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] stack_d2 = np.empty(max_nodes + 2, dtype=np.float64)
    cdef Py_ssize_t sp = 0
    cdef Py_ssize_t node, j, i, pos, child, parent_pos, d
    cdef cnp.int64_t pid, tmp_id
    cdef double plane_d2, diff, d2, tmp_d2, far_d2
    cdef int axis

    stack_node[0] = 0
    stack_d2[0] = 0.0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        plane_d2 = stack_d2[sp]
        if hsize == k and hd2[0] < plane_d2:
            continue
        axis = ndim_[node]
        if axis < 0:
            for j in range(nstart[node], nend[node]):
                pid = prm[j]
                d2 = 0.0
                for i in range(dim):
                    diff = pts[pid, i] - q[i]
                    d2 += diff * diff
                if hsize < k:
                    # sift up
                    pos = hsize
                    hsize += 1
                    hd2[pos] = d2
                    hid[pos] = pid
                    while pos > 0:
                        parent_pos = (pos - 1) >> 1
                        if _worse(hd2[pos], hid[pos], hd2[parent_pos], hid[parent_pos]):
                            tmp_d2 = hd2[pos]; hd2[pos] = hd2[parent_pos]; hd2[parent_pos] = tmp_d2
                            tmp_id = hid[pos]; hid[pos] = hid[parent_pos]; hid[parent_pos] = tmp_id
                            pos = parent_pos
                        else:
                            break
                elif _worse(hd2[0], hid[0], d2, pid):
                    # replace root, sift down
                    hd2[0] = d2
                    hid[0] = pid
                    pos = 0
                    while True:
                        child = 2 * pos + 1
                        if child >= k:
                            break
                        if child + 1 < k and _worse(hd2[child + 1], hid[child + 1], hd2[child], hid[child]):
                            child += 1
                        if _worse(hd2[child], hid[child], hd2[pos], hid[pos]):
                            tmp_d2 = hd2[pos]; hd2[pos] = hd2[child]; hd2[child] = tmp_d2
                            tmp_id = hid[pos]; hid[pos] = hid[child]; hid[child] = tmp_id
                            pos = child
                        else:
                            break
        else:
            diff = q[axis] - nsplit[node]
            far_d2 = diff * diff
            if far_d2 < plane_d2:
                far_d2 = plane_d2
            if diff <= 0:
                stack_node[sp] = nright[node]; stack_d2[sp] = far_d2; sp += 1
                stack_node[sp] = nleft[node]; stack_d2[sp] = plane_d2; sp += 1
            else:
                stack_node[sp] = nleft[node]; stack_d2[sp] = far_d2; sp += 1
                stack_node[sp] = nright[node]; stack_d2[sp] = plane_d2; sp += 1

    order = np.lexsort((hid[:hsize], hd2[:hsize]))
    return hid[:hsize][order].copy(), hd2[:hsize][order].copy()
