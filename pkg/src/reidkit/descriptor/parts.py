"""Body-part regions and 4x4 mean-std pooling of per-pixel features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.skeleton import Skeleton2D

# part name -> defining joint pair
PART_JOINTS = {
    "head": ("HEAD", "SHOULDER_CENTER"),
    "lower_arm_left": ("ELBOW_L", "HAND_L"),
    "lower_arm_right": ("ELBOW_R", "HAND_R"),
    "lower_leg_left": ("KNEE_L", "FOOT_L"),
    "lower_leg_right": ("KNEE_R", "FOOT_R"),
    "torso": ("SHOULDER_CENTER", "HIP_CENTER"),
    "upper_arm_left": ("SHOULDER_L", "ELBOW_L"),
    "upper_arm_right": ("SHOULDER_R", "ELBOW_R"),
    "upper_leg_left": ("HIP_L", "KNEE_L"),
    "upper_leg_right": ("HIP_R", "KNEE_R"),
}

PART_NAMES = tuple(sorted(PART_JOINTS))
N_PARTS = len(PART_NAMES)
GRID = 4
PAD_FRACTION = 0.25


@dataclass(frozen=True)
class BodyPartRegion:
    name: str
    # half-open pixel bounds, clipped to the image
    r0: int
    r1: int
    c0: int
    c1: int

    @property
    def height(self) -> int:
        return self.r1 - self.r0

    @property
    def width(self) -> int:
        return self.c1 - self.c0


def _part_box(pa: np.ndarray, pb: np.ndarray, width: int, height: int) -> tuple[int, int, int, int]:
    if np.isnan(pa).any() or np.isnan(pb).any():
        return 0, height, 0, width
    u0, u1 = min(pa[0], pb[0]), max(pa[0], pb[0])
    v0, v1 = min(pa[1], pb[1]), max(pa[1], pb[1])
    pad = PAD_FRACTION * float(np.hypot(u1 - u0, v1 - v0))
    r0 = int(np.floor(v0 - pad))
    r1 = int(np.ceil(v1 + pad)) + 1
    c0 = int(np.floor(u0 - pad))
    c1 = int(np.ceil(u1 + pad)) + 1
    r0 = max(r0, 0)
    c0 = max(c0, 0)
    r1 = min(r1, height)
    c1 = min(c1, width)
    # a part projected entirely outside keeps a degenerate box at the edge
    r1 = max(r1, r0 + 1) if r0 < height else height
    c1 = max(c1, c0 + 1) if c0 < width else width
    return r0, r1, c0, c1


def part_regions(skel2d: Skeleton2D, width: int, height: int) -> list[BodyPartRegion]:
    """Padded joint-pair boxes for the 10 body parts, in name order."""
    out = []
    for name in PART_NAMES:
        ja, jb = PART_JOINTS[name]
        r0, r1, c0, c1 = _part_box(skel2d.uv(ja), skel2d.uv(jb), width, height)
        out.append(BodyPartRegion(name, r0, r1, c0, c1))
    return out


def pool_region(features: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Mean-std pooling of (h, w, C) features on a 4x4 grid.

    Statistics are computed over mask-foreground pixels only; population
    std (ddof=0). An empty cell contributes zeros. Output layout is
    cell-major: for each of the 16 cells, C means then C stds.
    """
    h, w, n_ch = features.shape
    if mask.shape != (h, w):
        raise ValueError("mask and features disagree on region size")
    row_edges = np.linspace(0, h, GRID + 1).round().astype(int)
    col_edges = np.linspace(0, w, GRID + 1).round().astype(int)
    out = np.zeros(GRID * GRID * 2 * n_ch)
    idx = 0
    for gy in range(GRID):
        for gx in range(GRID):
            cell = features[row_edges[gy]:row_edges[gy + 1], col_edges[gx]:col_edges[gx + 1]]
            cmask = mask[row_edges[gy]:row_edges[gy + 1], col_edges[gx]:col_edges[gx + 1]]
            sel = cell[cmask]
            if sel.size:
                out[idx:idx + n_ch] = sel.mean(axis=0)
                out[idx + n_ch:idx + 2 * n_ch] = sel.std(axis=0)
            idx += 2 * n_ch
    return out


def pooled_dim(n_channels: int) -> int:
    return N_PARTS * GRID * GRID * 2 * n_channels


def pool_parts(features: np.ndarray, mask: np.ndarray, regions: list[BodyPartRegion]) -> np.ndarray:
    """Concatenated pooled vectors for all part regions, region order preserved."""
    chunks = []
    for reg in regions:
        chunks.append(pool_region(
            features[reg.r0:reg.r1, reg.c0:reg.c1],
            mask[reg.r0:reg.r1, reg.c0:reg.c1],
        ))
    return np.concatenate(chunks)
