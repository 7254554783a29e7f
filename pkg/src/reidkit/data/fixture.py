"""Synthetic RGB-D corpus rendering.

Subjects are capsule people: body segments drawn as thick 2D capsules whose
endpoints come from projecting a 3D stick skeleton, so masks, depth, joints,
and calibration stay geometrically consistent. Every random draw is keyed by
(seed, subject) or (seed, subject, frame), which makes output byte-identical
across runs and lets enrollment and probe frames use disjoint noise.

Per-subject limb proportions vary by about +/-15% and clothing gets a
distinct hue per subject; `color_permutation` re-dresses subject i in the
clothing colors of subject permutation[i] to simulate a wardrobe change
between enrollment and probe sessions.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.data.io import save_annotated, save_ground_truth, save_skeleton, write_json, write_png
from reidkit.data.types import (
    JOINT_NAMES,
    AnnotatedImage,
    Calibration,
    GroundTruthTags,
    Joint,
    TrackingState,
)
from reidkit.data.vocab import label_id

LABEL_SHIRT = "shirt"
LABEL_JEANS = "jeans"
LABEL_SHOES = "shoes"
FIXTURE_TAGS = (LABEL_SHIRT, LABEL_JEANS, LABEL_SHOES)


@dataclass
class SubjectParams:
    torso: float
    neck: float
    shoulder_w: float
    hip_w: float
    upper_arm: float
    forearm: float
    hand: float
    upper_leg: float
    lower_leg: float
    foot: float
    head_r: float
    torso_r: float
    arm_r: float
    leg_r: float
    shirt_rgb: tuple[float, float, float]
    pants_rgb: tuple[float, float, float]
    shoe_rgb: tuple[float, float, float]
    skin_rgb: tuple[float, float, float]
    hair_rgb: tuple[float, float, float]
    stripe_period: float
    stripe_amp: float
    stripe_phase: float


def _hsv(h: float, s: float, v: float) -> tuple[float, float, float]:
    r, g, b = colorsys.hsv_to_rgb(h % 1.0, s, v)
    return (255.0 * r, 255.0 * g, 255.0 * b)


def subject_params(seed: int, subj: int) -> SubjectParams:
    rng = np.random.default_rng([seed, subj])

    def scale() -> float:
        return 1.0 + 0.30 * (rng.random() - 0.5)

    hue = (subj * 0.6180339887 + 0.07 * rng.random()) % 1.0
    return SubjectParams(
        torso=0.50 * scale(),
        neck=0.24 * scale(),
        shoulder_w=0.19 * scale(),
        hip_w=0.13 * scale(),
        upper_arm=0.28 * scale(),
        forearm=0.24 * scale(),
        hand=0.08,
        upper_leg=0.42 * scale(),
        lower_leg=0.40 * scale(),
        foot=0.10,
        head_r=0.105 * (1.0 + 0.16 * (rng.random() - 0.5)),
        torso_r=0.125 * (1.0 + 0.2 * (rng.random() - 0.5)),
        arm_r=0.045,
        leg_r=0.062,
        shirt_rgb=_hsv(hue, 0.72 + 0.2 * rng.random(), 0.75 + 0.2 * rng.random()),
        pants_rgb=_hsv(hue + 0.33 + 0.1 * rng.random(), 0.55, 0.45 + 0.15 * rng.random()),
        shoe_rgb=_hsv(hue + 0.61, 0.45, 0.22 + 0.12 * rng.random()),
        skin_rgb=_hsv(0.075 + 0.02 * rng.random(), 0.32 + 0.1 * rng.random(), 0.82),
        hair_rgb=_hsv(0.08, 0.5, 0.12 + 0.25 * rng.random()),
        stripe_period=8.0 + 7.0 * rng.random(),
        stripe_amp=0.10 + 0.12 * rng.random(),
        stripe_phase=2 * np.pi * rng.random(),
    )


def _pose3d(p: SubjectParams, rng: np.random.Generator, x0: float) -> dict[str, np.ndarray]:
    """3D joint positions (x right, y down, meters), hip center at y=0."""

    def jitter(a: float) -> float:
        return a * (rng.random() - 0.5)

    pts: dict[str, np.ndarray] = {}
    pts["HIP_CENTER"] = np.array([x0, 0.0])
    pts["SHOULDER_CENTER"] = np.array([x0, -p.torso])
    pts["SPINE"] = np.array([x0, -p.torso * 0.5])
    pts["HEAD"] = np.array([x0, -(p.torso + p.neck)])
    for side, s in (("L", -1.0), ("R", 1.0)):
        pts[f"SHOULDER_{side}"] = np.array([x0 + s * p.shoulder_w, -p.torso + 0.02])
        theta_u = 0.16 + jitter(0.16)
        theta_f = theta_u + 0.18 + jitter(0.14)
        du = np.array([s * np.sin(theta_u), np.cos(theta_u)])
        df = np.array([s * np.sin(theta_f), np.cos(theta_f)])
        pts[f"ELBOW_{side}"] = pts[f"SHOULDER_{side}"] + p.upper_arm * du
        pts[f"WRIST_{side}"] = pts[f"ELBOW_{side}"] + p.forearm * df
        pts[f"HAND_{side}"] = pts[f"WRIST_{side}"] + p.hand * df
        pts[f"HIP_{side}"] = np.array([x0 + s * p.hip_w, 0.0])
        phi_u = 0.07 + jitter(0.08)
        phi_l = phi_u * 0.4 + jitter(0.05)
        pts[f"KNEE_{side}"] = pts[f"HIP_{side}"] + p.upper_leg * np.array(
            [s * np.sin(phi_u), np.cos(phi_u)])
        pts[f"ANKLE_{side}"] = pts[f"KNEE_{side}"] + p.lower_leg * np.array(
            [s * np.sin(phi_l), np.cos(phi_l)])
        psi = 1.15 + jitter(0.1)
        pts[f"FOOT_{side}"] = pts[f"ANKLE_{side}"] + p.foot * np.array(
            [s * np.sin(psi), np.cos(psi)])
    return pts


def _paint_capsule(target: np.ndarray, p0: np.ndarray, p1: np.ndarray, radius: float,
                   value: int) -> None:
    h, w = target.shape
    r0 = max(int(np.floor(min(p0[1], p1[1]) - radius)) - 1, 0)
    r1 = min(int(np.ceil(max(p0[1], p1[1]) + radius)) + 2, h)
    c0 = max(int(np.floor(min(p0[0], p1[0]) - radius)) - 1, 0)
    c1 = min(int(np.ceil(max(p0[0], p1[0]) + radius)) + 2, w)
    if r0 >= r1 or c0 >= c1:
        return
    cols, rows = np.meshgrid(np.arange(c0, c1), np.arange(r0, r1))
    d = p1 - p0
    len2 = float(d @ d)
    px = cols - p0[0]
    py = rows - p0[1]
    if len2 > 0:
        t = np.clip((px * d[0] + py * d[1]) / len2, 0.0, 1.0)
    else:
        t = np.zeros_like(px, dtype=float)
    dx = px - t * d[0]
    dy = py - t * d[1]
    inside = dx * dx + dy * dy <= radius * radius
    target[r0:r1, c0:c1][inside] = value


@dataclass
class RenderedFrame:
    rgb: np.ndarray
    depth: np.ndarray
    mask: np.ndarray
    labels: np.ndarray
    joints: tuple[Joint, ...]
    pose2d: np.ndarray


def render_frame(params: SubjectParams, wardrobe: SubjectParams, seed: int, subj: int,
                 frame: int, calib: Calibration,
                 z_range: tuple[float, float] = (2.6, 3.0)) -> RenderedFrame:
    """One observation of a subject; `wardrobe` supplies clothing colors."""
    rng = np.random.default_rng([seed, subj, frame])
    h, w = calib.height, calib.width
    z = z_range[0] + (z_range[1] - z_range[0]) * rng.random()
    x0 = 0.20 * (rng.random() - 0.5)
    pts = _pose3d(params, rng, x0)

    # drop the body so the shoe soles land a fixed margin above the image edge
    foot_y = max(pts["FOOT_L"][1], pts["FOOT_R"][1]) + params.leg_r * 0.9
    v_target = h - 9
    y_shift = (v_target - calib.cy) * z / calib.fy - foot_y
    for key in pts:
        pts[key] = pts[key] + np.array([0.0, y_shift])

    def proj(pt: np.ndarray) -> np.ndarray:
        return np.array([calib.fx * pt[0] / z + calib.cx,
                         calib.fy * pt[1] / z + calib.cy])

    uv = {name: proj(pts[name]) for name in pts}
    px = calib.fx / z  # meters -> pixels

    null = label_id("null")
    labels = np.full((h, w), null, dtype=np.int32)
    skin, hair = label_id("skin"), label_id("hair")
    shirt, jeans, shoes = (label_id(LABEL_SHIRT), label_id(LABEL_JEANS),
                           label_id(LABEL_SHOES))

    _paint_capsule(labels, uv["SHOULDER_CENTER"], uv["HIP_CENTER"], params.torso_r * px, shirt)
    _paint_capsule(labels, uv["HIP_L"], uv["HIP_R"], params.torso_r * 0.9 * px, jeans)
    for side in ("L", "R"):
        _paint_capsule(labels, uv[f"HIP_{side}"], uv[f"KNEE_{side}"], params.leg_r * px, jeans)
        _paint_capsule(labels, uv[f"KNEE_{side}"], uv[f"ANKLE_{side}"],
                       params.leg_r * 0.85 * px, jeans)
        _paint_capsule(labels, uv[f"ANKLE_{side}"], uv[f"FOOT_{side}"],
                       params.leg_r * 0.9 * px, shoes)
        _paint_capsule(labels, uv[f"SHOULDER_{side}"], uv[f"ELBOW_{side}"],
                       params.arm_r * px, shirt)
        _paint_capsule(labels, uv[f"ELBOW_{side}"], uv[f"WRIST_{side}"],
                       params.arm_r * 0.85 * px, skin)
        _paint_capsule(labels, uv[f"WRIST_{side}"], uv[f"HAND_{side}"],
                       params.arm_r * 0.8 * px, skin)
    head_r_px = params.head_r * px
    _paint_capsule(labels, uv["HEAD"], uv["HEAD"], head_r_px, skin)
    hair_line = np.array([uv["HEAD"][0], uv["HEAD"][1] - 0.45 * head_r_px])
    _paint_capsule(labels, hair_line, hair_line, 0.75 * head_r_px, hair)

    mask = labels != null

    rgb = np.full((h, w, 3), 235.0)
    color_of = {
        shirt: wardrobe.shirt_rgb,
        jeans: wardrobe.pants_rgb,
        shoes: wardrobe.shoe_rgb,
        skin: params.skin_rgb,
        hair: params.hair_rgb,
    }
    for lab, color in color_of.items():
        rgb[labels == lab] = color
    rows = np.arange(h)[:, None]
    stripe = 1.0 + wardrobe.stripe_amp * np.sin(
        2 * np.pi * rows / wardrobe.stripe_period + wardrobe.stripe_phase)
    shirt_sel = labels == shirt
    rgb[shirt_sel] = rgb[shirt_sel] * np.broadcast_to(stripe[..., None], (h, w, 1))[shirt_sel]
    rgb = rgb + rng.normal(0.0, 3.0, size=rgb.shape)
    rgb = np.clip(rgb, 0, 255).astype(np.uint8)

    depth = np.where(mask, np.uint16(round(z * 1000)), np.uint16(0)).astype(np.uint16)

    joints = tuple(
        Joint(name=name,
              position3d=(float(pts[name][0]), float(pts[name][1]), z),
              tracking_state=TrackingState.TRACKED)
        for name in JOINT_NAMES
    )
    pose2d = np.array([uv[name] for name in JOINT_NAMES])
    return RenderedFrame(rgb=rgb, depth=depth, mask=mask, labels=labels,
                         joints=joints, pose2d=pose2d)


def default_calibration(width: int = 96, height: int = 128) -> Calibration:
    return Calibration(fx=150.0, fy=150.0, cx=width / 2.0, cy=height / 2.0,
                       width=width, height=height)


def generate_fixture(root: str | Path, seed: int = 0, n_subjects: int = 5,
                     frames_per_subject: int = 4, *, frame_offset: int = 0,
                     color_permutation: list[int] | None = None,
                     subject_offset: int = 0,
                     calib: Calibration | None = None,
                     annotated: bool = True,
                     z_range: tuple[float, float] = (2.6, 3.0)) -> list[Path]:
    """Write a corpus of capsule-person sequences; returns sequence dirs.

    frame_offset shifts the per-frame random streams so a second call can
    produce probe frames whose noise is disjoint from enrollment frames.
    """
    if n_subjects < 1:
        raise ValueError("need at least one subject")
    root = Path(root)
    calib = calib or default_calibration()
    perm = color_permutation or list(range(n_subjects))
    if sorted(perm) != list(range(n_subjects)):
        raise ValueError("color_permutation must permute the subject indices")
    seq_dirs = []
    records = []
    for s in range(n_subjects):
        subj = subject_offset + s
        seq_id = f"subject{subj + 1:02d}"
        seq_dir = root / seq_id
        seq_dir.mkdir(parents=True, exist_ok=True)
        params = subject_params(seed, subj)
        wardrobe = subject_params(seed, subject_offset + perm[s])
        write_json(seq_dir / "calib.json", {
            "fx": calib.fx, "fy": calib.fy, "cx": calib.cx, "cy": calib.cy,
            "width": calib.width, "height": calib.height,
        })
        for j in range(frames_per_subject):
            frame = frame_offset + j
            rendered = render_frame(params, wardrobe, seed, subj, frame, calib, z_range)
            stem = seq_dir / f"frame_{j:06d}"
            write_png(Path(str(stem) + ".rgb.png"), rendered.rgb)
            write_png(Path(str(stem) + ".depth.png"), rendered.depth)
            write_png(Path(str(stem) + ".mask.png"),
                      rendered.mask.astype(np.uint8) * 255)
            save_skeleton(Path(str(stem) + ".skel.json"), rendered.joints, True)
            if annotated:
                save_annotated(root / "annotated", AnnotatedImage(
                    rgb=rendered.rgb,
                    labels=rendered.labels.astype(np.int64),
                    tags=frozenset(FIXTURE_TAGS),
                    pose2d=rendered.pose2d,
                    image_id=f"{seq_id}_{j:06d}",
                ))
        records.append(GroundTruthTags(sequence_id=seq_id, tags=frozenset(FIXTURE_TAGS)))
        seq_dirs.append(seq_dir)
    save_ground_truth(root / "ground_truth.tsv", records)
    return seq_dirs


def generate_corpus(root: str | Path, seed: int = 0, n_train: int = 50,
                    n_test: int = 56, frames_per_sequence: int = 1) -> dict[str, list[Path]]:
    """Train/test split corpus shaped like the full benchmark dataset."""
    root = Path(root)
    calib = default_calibration(64, 96)
    train = generate_fixture(root / "train", seed, n_train, frames_per_sequence,
                             calib=calib, annotated=False)
    test = generate_fixture(root / "test", seed, n_test, frames_per_sequence,
                            subject_offset=n_train, calib=calib, annotated=False)
    return {"train": train, "test": test}
