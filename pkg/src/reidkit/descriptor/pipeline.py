"""Frame/image -> pooled appearance vector -> identity descriptor."""

from __future__ import annotations

import numpy as np

from reidkit.config import Config
from reidkit.data.types import AnnotatedImage, Frame
from reidkit.data.vocab import null_id
from reidkit.descriptor import parts
from reidkit.descriptor.pca import PcaModel, compress, identity_descriptor
from reidkit.errors import DegenerateSkeletonError
from reidkit.features import stack
from reidkit.features.skinhair import SkinHairModel
from reidkit.skeleton import (
    Skeleton2D,
    SkeletonStats,
    frame_descriptor_raw,
    gate_frame,
    normalize_descriptor,
    project,
    skeleton2d_from_pose,
)


def appearance_columns(config: Config) -> np.ndarray:
    if config.include_pose_channels:
        return np.arange(stack.N_CHANNELS)
    return stack.APPEARANCE_DEFAULT


def _pool(features: np.ndarray, mask: np.ndarray, skel2d: Skeleton2D,
          config: Config) -> np.ndarray:
    h, w = mask.shape
    if config.pool_whole_body:
        rows = np.nonzero(mask.any(axis=1))[0]
        cols = np.nonzero(mask.any(axis=0))[0]
        if rows.size == 0:
            raise ValueError("empty mask, nothing to pool")
        region = parts.BodyPartRegion("body", rows[0], rows[-1] + 1, cols[0], cols[-1] + 1)
        regions = [region] * parts.N_PARTS
    else:
        regions = parts.part_regions(skel2d, w, h)
    return parts.pool_parts(features, mask, regions)


def frame_appearance_vector(frame: Frame, skin_hair: SkinHairModel,
                            config: Config | None = None) -> np.ndarray:
    """Pooled (un-compressed) appearance vector for one gated frame."""
    config = config or Config()
    skel2d = project(frame.skeleton, frame.calibration)
    uv, tracked = stack.joints_from_skeleton2d(skel2d)
    base = stack.base_features(frame.rgb, uv, tracked,
                               lbp_window=config.lbp_window, cell_size=config.hog_cell)
    full = stack.full_features(base, skin_hair)
    cols = appearance_columns(config)
    return _pool(full[:, :, cols], frame.person_mask, skel2d, config)


def annotated_appearance_vector(annotated: AnnotatedImage, skin_hair: SkinHairModel,
                                config: Config | None = None) -> np.ndarray:
    """Pooled appearance vector for a 2D annotated image (pose from annotation)."""
    config = config or Config()
    h, w = annotated.labels.shape
    uv, tracked = stack.joints_from_pose2d(annotated.pose2d, w, h)
    base = stack.base_features(annotated.rgb, uv, tracked,
                               lbp_window=config.lbp_window, cell_size=config.hog_cell)
    full = stack.full_features(base, skin_hair)
    cols = appearance_columns(config)
    skel2d = skeleton2d_from_pose(annotated.pose2d)
    return _pool(full[:, :, cols], annotated.foreground(null_id()), skel2d, config)


def frame_identity_descriptor(frame: Frame, skin_hair: SkinHairModel, pca: PcaModel,
                              config: Config | None = None) -> np.ndarray:
    """Full combined descriptor for one gated frame."""
    config = config or Config()
    if not gate_frame(frame):
        raise DegenerateSkeletonError(
            f"frame {frame.sequence_id}/{frame.frame_index} does not pass the gate")
    clothing = compress(pca, frame_appearance_vector(frame, skin_hair, config))
    raw = frame_descriptor_raw(frame)
    skel = normalize_descriptor(raw, pca.skeleton_stats).values
    return identity_descriptor(clothing, skel, config.skeleton_weight)


def sequence_identity_descriptor(frames: list[Frame], skin_hair: SkinHairModel,
                                 pca: PcaModel, config: Config | None = None) -> np.ndarray:
    """Enrollment descriptor: mean of per-frame descriptors over gated frames."""
    config = config or Config()
    vecs = [frame_identity_descriptor(f, skin_hair, pca, config)
            for f in frames if gate_frame(f)]
    if not vecs:
        raise DegenerateSkeletonError("no frame in the sequence passes the gate")
    return np.mean(vecs, axis=0)


def collect_training_stats(sequences: list[list[Frame]]) -> SkeletonStats:
    """Skeleton z-score statistics over all gated frames of the training set."""
    raws = []
    for frames in sequences:
        for f in frames:
            if gate_frame(f):
                raws.append(frame_descriptor_raw(f))
    if not raws:
        raise DegenerateSkeletonError("no gated frames in training data")
    from reidkit.skeleton import scale_normalize
    scaled = np.stack([scale_normalize(r) for r in raws])
    return SkeletonStats.fit(scaled)
