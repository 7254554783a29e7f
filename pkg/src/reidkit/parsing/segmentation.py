"""Graph-based oversegmentation into superpixels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter

from reidkit import kernels


@dataclass
class Superpixel:
    id: int
    centroid: np.ndarray  # (row, col) pixel mean
    centroid_norm: np.ndarray  # pose-normalized (see pose_normalize)
    size: int
    bow: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _grid_edges(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(h * w).reshape(h, w)
    pairs = [
        (idx[:, :-1], idx[:, 1:]),  # east
        (idx[:-1, :], idx[1:, :]),  # south
        (idx[:-1, :-1], idx[1:, 1:]),  # south-east
        (idx[:-1, 1:], idx[1:, :-1]),  # south-west
    ]
    a = np.concatenate([p[0].ravel() for p in pairs])
    b = np.concatenate([p[1].ravel() for p in pairs])
    return a, b


def oversegment(rgb: np.ndarray, k_scale: float = 100.0, sigma: float = 0.5,
                min_size: int = 20) -> np.ndarray:
    """Felzenszwalb-style segmentation.

    8-connected grid graph, Euclidean RGB edge weights on a Gaussian-smoothed
    copy, merge threshold k_scale/|C|, post-merge of small components.
    Returns an (H, W) int32 label map with ids numbered by first occurrence
    in row-major order.
    """
    img = np.asarray(rgb, dtype=np.float64)
    h, w = img.shape[:2]
    smooth = np.stack([gaussian_filter(img[:, :, c], sigma, mode="nearest")
                       for c in range(img.shape[2])], axis=-1)
    flat = smooth.reshape(-1, img.shape[2])
    ea, eb = _grid_edges(h, w)
    weight = np.linalg.norm(flat[ea] - flat[eb], axis=1)
    order = np.argsort(weight, kind="stable")
    roots = kernels.felz_segment(ea[order].astype(np.int64), eb[order].astype(np.int64),
                                 weight[order], h * w, float(k_scale), int(min_size))
    _, labels = np.unique(roots, return_inverse=True)
    # renumber by first occurrence so ids are deterministic in row-major order
    first = np.full(labels.max() + 1, -1, dtype=np.int64)
    remap = np.empty_like(first)
    next_id = 0
    for v in labels:
        if first[v] < 0:
            first[v] = next_id
            next_id += 1
    remap = first
    return remap[labels].reshape(h, w).astype(np.int32)


def pose_bbox(pose_uv: np.ndarray) -> tuple[float, float, float, float]:
    """(u_min, v_min, u_max, v_max) over non-NaN joints."""
    pts = np.asarray(pose_uv, dtype=float)
    ok = ~np.isnan(pts).any(axis=1)
    if not ok.any():
        raise ValueError("no valid pose joints for normalization")
    sel = pts[ok]
    return (float(sel[:, 0].min()), float(sel[:, 1].min()),
            float(sel[:, 0].max()), float(sel[:, 1].max()))


def pose_normalize(points_uv: np.ndarray, bbox: tuple[float, float, float, float]) -> np.ndarray:
    """Map pixel (u, v) points into pose-relative units.

    Offsets from the pose bounding-box corner are divided by the box diagonal,
    so a distance of 1.0 spans the full pose extent regardless of image scale.
    """
    u0, v0, u1, v1 = bbox
    diag = float(np.hypot(u1 - u0, v1 - v0))
    if diag <= 0:
        diag = 1.0
    pts = np.asarray(points_uv, dtype=float)
    return (pts - np.array([u0, v0])) / diag


def superpixel_stats(labels: np.ndarray, pose_uv: np.ndarray) -> list[Superpixel]:
    """Centroids (plain and pose-normalized) + sizes per superpixel id."""
    h, w = labels.shape
    n = int(labels.max()) + 1
    flat = labels.ravel()
    counts = np.bincount(flat, minlength=n)
    rows = np.bincount(flat, weights=np.repeat(np.arange(h), w), minlength=n)
    cols = np.bincount(flat, weights=np.tile(np.arange(w), h), minlength=n)
    cr = rows / np.maximum(counts, 1)
    cc = cols / np.maximum(counts, 1)
    bbox = pose_bbox(pose_uv)
    norm = pose_normalize(np.stack([cc, cr], axis=1), bbox)  # (u, v) order
    return [Superpixel(id=i, centroid=np.array([cr[i], cc[i]]),
                       centroid_norm=norm[i], size=int(counts[i]))
            for i in range(n)]
