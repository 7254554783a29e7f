"""Per-pixel feature stack assembly.

Channel layout, version 1 (73 channels):

    0:3    L*, a*, b*
    3:41   LBP-HF (38)
    41:50  HOG (9)
    50     boundary distance, -log(1 + d)
    51:71  pose distances, -log(1 + d), one channel per joint
    71:73  skin, hair likelihoods

The skin/hair detector consumes channels 0:71. The clothing-parse model uses
color, pose, texture and shape only (boundary excluded). The clothing
descriptor pools appearance channels (pose excluded, it encodes location).
"""

import numpy as np

from reidkit.data.types import N_JOINTS, TrackingState
from reidkit.features.color import rgb_to_lab
from reidkit.features.hog import hog_map
from reidkit.features.lbp import lbp_hf_map
from reidkit.features.maps import boundary_distance_map, pose_distance_map

LAYOUT_VERSION = 1

LAB = slice(0, 3)
LBP = slice(3, 41)
HOG = slice(41, 50)
BOUNDARY = slice(50, 51)
POSE = slice(51, 71)
SKIN_HAIR = slice(71, 73)

N_BASE_CHANNELS = 71  # everything except the skin/hair likelihoods
N_CHANNELS = 73

SKIN_HAIR_INPUT = np.arange(0, 71)
GLOBAL_PARSE_INPUT = np.r_[0:50, 51:71]  # lab + lbp + hog + pose
APPEARANCE_DEFAULT = np.r_[0:51, 71:73]  # lab + lbp + hog + boundary + skin/hair
APPEARANCE_WITH_POSE = np.arange(0, 73)

BOW_GROUPS = {"lab": np.arange(0, 3), "lbp": np.arange(3, 41), "gradient": np.arange(41, 50)}


def base_features(rgb: np.ndarray, joints_uv: np.ndarray, tracked: np.ndarray,
                  *, lbp_window: int = 15, cell_size: int = 8) -> np.ndarray:
    """Compute channels 0:71 for a whole image; (H, W, 71) float64."""
    h, w = rgb.shape[:2]
    lab = rgb_to_lab(rgb)
    out = np.empty((h, w, N_BASE_CHANNELS))
    out[:, :, LAB] = lab
    out[:, :, LBP] = lbp_hf_map(lab[:, :, 0], window_size=lbp_window)
    out[:, :, HOG] = hog_map(lab[:, :, 0], cell_size=cell_size)
    out[:, :, BOUNDARY] = boundary_distance_map(w, h)[:, :, None]
    out[:, :, POSE] = pose_distance_map(joints_uv, tracked, w, h)
    return out


def full_features(base: np.ndarray, skin_hair_model) -> np.ndarray:
    """Append the two skin/hair likelihood channels to a base stack."""
    h, w, _ = base.shape
    probs = skin_hair_model.likelihood(base[:, :, :N_BASE_CHANNELS].reshape(-1, N_BASE_CHANNELS))
    out = np.empty((h, w, N_CHANNELS))
    out[:, :, :N_BASE_CHANNELS] = base
    out[:, :, SKIN_HAIR] = probs.reshape(h, w, 2)
    return out


def joints_from_skeleton2d(skel2d) -> tuple[np.ndarray, np.ndarray]:
    """(20, 2) uv array + tracked mask from a Skeleton2D."""
    uv = np.array([[j.u, j.v] for j in skel2d.joints])
    tracked = np.array(
        [j.tracking_state is not TrackingState.NOT_TRACKED for j in skel2d.joints]
    )
    return uv, tracked


def joints_from_pose2d(pose2d: np.ndarray | None, width: int, height: int):
    """Pose joints for annotated fashion images; NaN rows count as untracked."""
    if pose2d is None:
        uv = np.zeros((N_JOINTS, 2))
        return uv, np.zeros(N_JOINTS, dtype=bool)
    uv = np.nan_to_num(np.asarray(pose2d, dtype=float))
    tracked = ~np.isnan(np.asarray(pose2d, dtype=float)).any(axis=1)
    return uv, tracked
