"""Frame gating, joint projection, and the 13-feature anthropometric descriptor.

Feature order:

    0  (a) head height           v_floor - v(HEAD)
    1  (b) neck height           v_floor - v(SHOULDER_CENTER)
    2  (c) neck to left shoulder
    3  (d) neck to right shoulder
    4  (e) torso to right shoulder   (SPINE as torso reference)
    5  (f) right arm length          shoulder->elbow->hand
    6  (g) left arm length
    7  (h) right upper leg length
    8  (i) left upper leg length
    9  (j) torso length              SHOULDER_CENTER->HIP_CENTER
    10 (k) hip to hip distance
    11 (l) j / h
    12 (m) j / i

All distances are 2D pixel distances; v_floor is the lowest foreground mask
row. Lengths 0..10 are divided by the head height to cancel camera distance,
then all 13 entries are z-scored with training-set statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.data.types import JOINT_INDEX, JOINT_NAMES, Calibration, Frame, TrackingState
from reidkit.errors import DegenerateSkeletonError

N_FEATURES = 13
RATIO_FEATURES = (11, 12)


@dataclass(frozen=True)
class Joint2D:
    name: str
    u: float
    v: float
    tracking_state: TrackingState


@dataclass
class Skeleton2D:
    joints: tuple[Joint2D, ...]

    def joint(self, name: str) -> Joint2D:
        return self.joints[JOINT_INDEX[name]]

    def uv(self, name: str) -> np.ndarray:
        j = self.joint(name)
        return np.array([j.u, j.v])


@dataclass(frozen=True)
class SkeletonDescriptor:
    values: np.ndarray  # (13,) z-scored
    stats_id: str = ""


def gate_frame(frame: Frame) -> bool:
    """Accept only frames with a fully tracked skeleton and a detected face."""
    if not frame.face_detected:
        return False
    return all(j.tracking_state is TrackingState.TRACKED for j in frame.skeleton)


def project(skeleton, calibration: Calibration) -> Skeleton2D:
    """Pinhole projection of 3D joints onto the image plane."""
    out = []
    for j in skeleton:
        x, y, z = j.position3d
        if j.tracking_state is TrackingState.NOT_TRACKED:
            out.append(Joint2D(j.name, 0.0, 0.0, j.tracking_state))
            continue
        if z <= 0:
            raise DegenerateSkeletonError(f"joint {j.name} has nonpositive depth {z}")
        u = calibration.fx * x / z + calibration.cx
        v = calibration.fy * y / z + calibration.cy
        out.append(Joint2D(j.name, u, v, j.tracking_state))
    return Skeleton2D(joints=tuple(out))


def _dist(skel: Skeleton2D, a: str, b: str) -> float:
    return float(np.linalg.norm(skel.uv(a) - skel.uv(b)))


def skeleton_features(skel2d: Skeleton2D, person_mask: np.ndarray) -> np.ndarray:
    """Raw 13-feature vector from a gated frame."""
    if not person_mask.any():
        raise DegenerateSkeletonError("empty person mask, no floor reference")
    v_floor = float(np.max(np.nonzero(person_mask.any(axis=1))[0]))
    f = np.empty(N_FEATURES)
    f[0] = v_floor - skel2d.joint("HEAD").v
    f[1] = v_floor - skel2d.joint("SHOULDER_CENTER").v
    f[2] = _dist(skel2d, "SHOULDER_CENTER", "SHOULDER_L")
    f[3] = _dist(skel2d, "SHOULDER_CENTER", "SHOULDER_R")
    f[4] = _dist(skel2d, "SPINE", "SHOULDER_R")
    f[5] = _dist(skel2d, "SHOULDER_R", "ELBOW_R") + _dist(skel2d, "ELBOW_R", "HAND_R")
    f[6] = _dist(skel2d, "SHOULDER_L", "ELBOW_L") + _dist(skel2d, "ELBOW_L", "HAND_L")
    f[7] = _dist(skel2d, "HIP_R", "KNEE_R")
    f[8] = _dist(skel2d, "HIP_L", "KNEE_L")
    f[9] = _dist(skel2d, "SHOULDER_CENTER", "HIP_CENTER")
    f[10] = _dist(skel2d, "HIP_L", "HIP_R")
    if f[7] == 0 or f[8] == 0:
        raise DegenerateSkeletonError("zero upper leg length, torso ratios undefined")
    f[11] = f[9] / f[7]
    f[12] = f[9] / f[8]
    return f


def scale_normalize(raw: np.ndarray) -> np.ndarray:
    """Divide the length features by the head height; ratios pass through."""
    if raw[0] <= 0:
        raise DegenerateSkeletonError(f"nonpositive head height {raw[0]}")
    out = raw.copy()
    out[:11] = raw[:11] / raw[0]
    return out


@dataclass
class SkeletonStats:
    """Training-set z-score statistics for normalized descriptors."""

    mean: np.ndarray  # (13,)
    std: np.ndarray  # (13,), zeros replaced by 1
    stats_id: str = ""

    @classmethod
    def fit(cls, normalized_vectors: np.ndarray, stats_id: str = "") -> SkeletonStats:
        arr = np.asarray(normalized_vectors, dtype=np.float64)
        mean = arr.mean(axis=0)
        std = arr.std(axis=0)
        std[std == 0] = 1.0
        return cls(mean=mean, std=std, stats_id=stats_id)


def normalize_descriptor(raw: np.ndarray, stats: SkeletonStats) -> SkeletonDescriptor:
    """Scale-cancel then z-score a raw feature vector."""
    scaled = scale_normalize(np.asarray(raw, dtype=np.float64))
    z = (scaled - stats.mean) / stats.std
    return SkeletonDescriptor(values=z, stats_id=stats.stats_id)


def frame_descriptor_raw(frame: Frame) -> np.ndarray:
    """Project and measure in one step; the frame must pass the gate."""
    skel2d = project(frame.skeleton, frame.calibration)
    return skeleton_features(skel2d, frame.person_mask)


def skeleton2d_from_pose(pose2d: np.ndarray | None) -> Skeleton2D:
    """Skeleton2D from an annotated (20, 2) pose array; NaN rows are untracked."""
    joints = []
    arr = None if pose2d is None else np.asarray(pose2d, dtype=float)
    for i, name in enumerate(JOINT_NAMES):
        if arr is None or np.isnan(arr[i]).any():
            joints.append(Joint2D(name, float("nan"), float("nan"), TrackingState.NOT_TRACKED))
        else:
            joints.append(Joint2D(name, float(arr[i, 0]), float(arr[i, 1]), TrackingState.TRACKED))
    return Skeleton2D(joints=tuple(joints))


__all__ = [
    "JOINT_NAMES",
    "Joint2D",
    "Skeleton2D",
    "SkeletonDescriptor",
    "SkeletonStats",
    "gate_frame",
    "project",
    "skeleton_features",
    "scale_normalize",
    "normalize_descriptor",
    "frame_descriptor_raw",
]
