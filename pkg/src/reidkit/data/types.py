"""Domain types for RGB-D person observations.

The skeleton uses the 20-joint set reported by consumer depth-sensor SDKs.
Joint positions are in camera coordinates (meters, x right, y down, z
forward); image coordinates are (u, v) pixels with v growing downward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from reidkit.data.vocab import validate_tags
from reidkit.errors import LoadError

JOINT_NAMES = (
    "HEAD",
    "SHOULDER_CENTER",
    "SHOULDER_L",
    "SHOULDER_R",
    "ELBOW_L",
    "ELBOW_R",
    "WRIST_L",
    "WRIST_R",
    "HAND_L",
    "HAND_R",
    "SPINE",
    "HIP_CENTER",
    "HIP_L",
    "HIP_R",
    "KNEE_L",
    "KNEE_R",
    "ANKLE_L",
    "ANKLE_R",
    "FOOT_L",
    "FOOT_R",
)

JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}
N_JOINTS = len(JOINT_NAMES)


class TrackingState(Enum):
    TRACKED = "TRACKED"
    INFERRED = "INFERRED"
    NOT_TRACKED = "NOT_TRACKED"


@dataclass(frozen=True)
class Calibration:
    """Pinhole intrinsics of the RGB-D sensor."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")


@dataclass(frozen=True)
class Joint:
    name: str
    position3d: tuple[float, float, float]
    tracking_state: TrackingState

    def __post_init__(self):
        if self.name not in JOINT_INDEX:
            raise ValueError(f"unknown joint name {self.name!r}")
        if self.tracking_state is TrackingState.TRACKED and self.position3d[2] <= 0:
            raise ValueError(f"tracked joint {self.name} must have z > 0")


def all_not_tracked_skeleton() -> tuple[Joint, ...]:
    """Placeholder skeleton for frames whose pose file is missing."""
    return tuple(
        Joint(name, (0.0, 0.0, 0.0), TrackingState.NOT_TRACKED) for name in JOINT_NAMES
    )


@dataclass
class Frame:
    """One RGB-D observation of a person."""

    rgb: np.ndarray  # (H, W, 3) uint8
    depth: np.ndarray  # (H, W) uint16 millimeters, 0 = invalid
    person_mask: np.ndarray  # (H, W) bool
    skeleton: tuple[Joint, ...]
    face_detected: bool
    calibration: Calibration
    sequence_id: str = ""
    frame_index: int = 0

    def validate(self, *, source: str = "frame"):
        """Enforce the structural invariants; raises LoadError naming the source."""
        h, w = self.rgb.shape[:2]
        if self.rgb.shape != (h, w, 3):
            raise LoadError(f"{source}: rgb must be HxWx3, got {self.rgb.shape}")
        if self.depth.shape != (h, w):
            raise LoadError(
                f"{source}: depth shape {self.depth.shape} does not match rgb {self.rgb.shape[:2]}"
            )
        if self.person_mask.shape != (h, w):
            raise LoadError(
                f"{source}: mask shape {self.person_mask.shape} does not match rgb {self.rgb.shape[:2]}"
            )
        if len(self.skeleton) != N_JOINTS:
            raise LoadError(f"{source}: expected {N_JOINTS} joints, got {len(self.skeleton)}")
        names = [j.name for j in self.skeleton]
        if sorted(names) != sorted(JOINT_NAMES):
            raise LoadError(f"{source}: skeleton joint names are not the canonical 20-joint set")
        any_tracked = any(j.tracking_state is TrackingState.TRACKED for j in self.skeleton)
        if any_tracked and not self.person_mask.any():
            raise LoadError(f"{source}: person mask empty although joints are tracked")

    def joint(self, name: str) -> Joint:
        return self.skeleton[JOINT_INDEX[name]]


@dataclass(frozen=True)
class GroundTruthTags:
    """Crowd-voted clothing tags for one sequence."""

    sequence_id: str
    tags: frozenset[str]

    def __post_init__(self):
        if not self.tags:
            raise ValueError("tag set must be nonempty")
        validate_tags(self.tags, context=f"sequence {self.sequence_id}")


@dataclass
class AnnotatedImage:
    """A fashion photo with per-pixel clothing labels and a 2D pose."""

    rgb: np.ndarray  # (H, W, 3) uint8
    labels: np.ndarray  # (H, W) integer label ids
    tags: set[str] = field(default_factory=set)
    pose2d: np.ndarray | None = None  # (20, 2) float (u, v), NaN when missing
    image_id: str = ""

    def foreground(self, null_label: int) -> np.ndarray:
        """Boolean mask of non-null pixels."""
        return self.labels != null_label
