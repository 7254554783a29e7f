"""Boundary and pose negative-log distance maps.

Both use -log(1 + d) so the value is finite and 0 exactly on the reference
set, and strictly decreasing in the distance d.
"""

import numpy as np

from reidkit.data.types import N_JOINTS


def boundary_distance_map(width: int, height: int) -> np.ndarray:
    """(H, W) map of -log(1 + d), d = Chebyshev distance to the image border."""
    rows = np.arange(height)
    cols = np.arange(width)
    d_row = np.minimum(rows, height - 1 - rows)
    d_col = np.minimum(cols, width - 1 - cols)
    d = np.minimum(d_row[:, None], d_col[None, :])
    return -np.log1p(d.astype(np.float64))


def pose_distance_map(joints_uv: np.ndarray, tracked: np.ndarray,
                      width: int, height: int) -> np.ndarray:
    """(H, W, 20) map; channel j is -log(1 + ||p - joint_j||).

    ``joints_uv`` is (20, 2) as (u, v); ``tracked`` is a (20,) bool mask.
    Untracked channels are filled with the sentinel -log(1 + image diagonal).
    """
    joints_uv = np.asarray(joints_uv, dtype=np.float64)
    if joints_uv.shape != (N_JOINTS, 2):
        raise ValueError(f"expected ({N_JOINTS}, 2) joints, got {joints_uv.shape}")
    uu, vv = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    diag = float(np.hypot(width, height))
    out = np.empty((height, width, N_JOINTS))
    sentinel = -np.log1p(diag)
    for j in range(N_JOINTS):
        if not tracked[j]:
            out[:, :, j] = sentinel
            continue
        d = np.hypot(uu - joints_uv[j, 0], vv - joints_uv[j, 1])
        out[:, :, j] = -np.log1p(d)
    return out
