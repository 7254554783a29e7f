"""Numpy fallback for the hot kernels.

Same contracts as the compiled module ``reidkit.kernels._native``; the test
suite asserts both produce the same results (distances up to summation
order). Keep the two in sync.
"""

import heapq

import numpy as np

# 8-neighbor ring at radius 1, circular order starting East, counterclockwise
# in image coordinates (row axis down). A 90-degree counterclockwise image
# rotation shifts this ring by exactly two positions.
NEIGHBOR_OFFSETS = (
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
)


def lbp_codes(gray: np.ndarray) -> np.ndarray:
    """8-bit local binary pattern code per interior pixel.

    Bit k is set when the k-th ring neighbor is >= the center value. Input is
    (H, W) float; output is (H-2, W-2) uint8.
    """
    g = np.asarray(gray, dtype=np.float64)
    center = g[1:-1, 1:-1]
    codes = np.zeros(center.shape, dtype=np.uint8)
    for k, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        neigh = g[1 + dr : g.shape[0] - 1 + dr, 1 + dc : g.shape[1] - 1 + dc]
        codes |= (neigh >= center).astype(np.uint8) << k
    return codes


def felz_segment(edge_a, edge_b, weight, n_vertices, k_scale, min_size):
    """Graph-based segmentation merge passes over presorted edges.

    Edges must already be sorted by nondecreasing weight. Returns int32 root
    labels per vertex (not compacted).
    """
    parent = np.arange(n_vertices, dtype=np.int64)
    size = np.ones(n_vertices, dtype=np.int64)
    # per-component merge threshold: max internal weight + k/|C|
    thr = np.full(n_vertices, float(k_scale), dtype=np.float64)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b, w in zip(edge_a, edge_b, weight):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if w <= thr[ra] and w <= thr[rb]:
            parent[rb] = ra
            size[ra] += size[rb]
            thr[ra] = w + k_scale / size[ra]

    for a, b in zip(edge_a, edge_b):
        ra, rb = find(a), find(b)
        if ra != rb and (size[ra] < min_size or size[rb] < min_size):
            parent[rb] = ra
            size[ra] += size[rb]

    return np.array([find(i) for i in range(n_vertices)], dtype=np.int32)


def kd_query(points, perm, node_dim, node_split, node_left, node_right,
             node_start, node_end, query, k):
    """Exact KNN over a flat-array KD-tree.

    Returns (ids int64, squared distances float64) sorted ascending by
    (distance, id). Ties anywhere are broken toward the smaller id.
    """
    # max-heap of the current k best as (-d2, -id); the top is the worst
    heap: list[tuple[float, float]] = []
    stack = [(0, 0.0)]
    while stack:
        node, plane_d2 = stack.pop()
        if len(heap) == k and -heap[0][0] < plane_d2:
            continue
        if node_dim[node] < 0:  # leaf
            idx = perm[node_start[node] : node_end[node]]
            d2 = np.einsum("ij,ij->i", points[idx] - query, points[idx] - query)
            for i, d in zip(idx, d2):
                cand = (-float(d), -int(i))
                if len(heap) < k:
                    heapq.heappush(heap, cand)
                elif cand > heap[0]:
                    heapq.heapreplace(heap, cand)
        else:
            d = node_dim[node]
            diff = query[d] - node_split[node]
            near, far = (node_left[node], node_right[node]) if diff <= 0 else (
                node_right[node], node_left[node])
            stack.append((far, max(plane_d2, diff * diff)))
            stack.append((near, plane_d2))
    order = sorted((-d, -i) for d, i in heap)
    ids = np.array([i for _, i in order], dtype=np.int64)
    d2s = np.array([d for d, _ in order], dtype=np.float64)
    return ids, d2s
