"""Exact KNN over a balanced KD-tree.

Construction: split dimension = maximum spread, split position = lower
median, leaves hold at most 16 points. The tree is stored as flat arrays so
the traversal kernel stays allocation-free.

Tie rule everywhere: order by (distance, entry id) ascending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit import kernels
from reidkit.errors import DimensionError

LEAF_SIZE = 16


@dataclass
class KdIndex:
    points: np.ndarray  # (n, d) float64, original order
    perm: np.ndarray  # (n,) int64, tree order -> original index
    node_dim: np.ndarray  # (m,) int32, -1 for leaf
    node_split: np.ndarray  # (m,) float64
    node_left: np.ndarray  # (m,) int32
    node_right: np.ndarray  # (m,) int32
    node_start: np.ndarray  # (m,) int32, leaf range in perm
    node_end: np.ndarray  # (m,) int32

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.node_dim[node] < 0:
                return 1
            return 1 + max(walk(self.node_left[node]), walk(self.node_right[node]))

        return walk(0)

    def knn(self, query: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(ids, distances) of the k nearest points, sorted by (distance, id)."""
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimensionError(f"query has shape {q.shape}, index holds dim {self.dim}")
        if k < 1:
            raise ValueError("k must be positive")
        ids, d2 = kernels.kd_query(
            self.points, self.perm, self.node_dim, self.node_split,
            self.node_left, self.node_right, self.node_start, self.node_end,
            q, min(k, self.size))
        return ids, np.sqrt(d2)


def build_index(points: np.ndarray) -> KdIndex:
    """Balanced KD-tree over row vectors."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty (n, d) point array")
    n = pts.shape[0]
    perm = np.arange(n, dtype=np.int64)

    node_dim: list[int] = []
    node_split: list[float] = []
    node_left: list[int] = []
    node_right: list[int] = []
    node_start: list[int] = []
    node_end: list[int] = []

    def new_node() -> int:
        node_dim.append(-1)
        node_split.append(0.0)
        node_left.append(-1)
        node_right.append(-1)
        node_start.append(0)
        node_end.append(0)
        return len(node_dim) - 1

    def build(start: int, end: int) -> int:
        node = new_node()
        count = end - start
        if count <= LEAF_SIZE:
            node_start[node] = start
            node_end[node] = end
            return node
        sub = pts[perm[start:end]]
        spread = sub.max(axis=0) - sub.min(axis=0)
        dim = int(np.argmax(spread))
        order = np.argsort(sub[:, dim], kind="stable")
        perm[start:end] = perm[start:end][order]
        mid = (count - 1) // 2  # lower median
        split = float(pts[perm[start + mid], dim])
        node_dim[node] = dim
        node_split[node] = split
        left = build(start, start + mid + 1)
        right = build(start + mid + 1, end)
        node_left[node] = left
        node_right[node] = right
        return node

    build(0, n)
    return KdIndex(
        points=pts,
        perm=perm,
        node_dim=np.array(node_dim, dtype=np.int32),
        node_split=np.array(node_split, dtype=np.float64),
        node_left=np.array(node_left, dtype=np.int32),
        node_right=np.array(node_right, dtype=np.int32),
        node_start=np.array(node_start, dtype=np.int32),
        node_end=np.array(node_end, dtype=np.int32),
    )


def linear_scan(points: np.ndarray, query: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Reference KNN by exhaustive scan, same tie rule as the tree."""
    pts = np.asarray(points, dtype=np.float64)
    q = np.asarray(query, dtype=np.float64)
    d2 = ((pts - q) ** 2).sum(axis=1)
    ids = np.arange(pts.shape[0])
    order = np.lexsort((ids, d2))[:k]
    return ids[order].astype(np.int64), np.sqrt(d2[order])
