"""Dataset directory loaders and writers.

Sequence directory layout::

    calib.json                 intrinsics: fx, fy, cx, cy, width, height
    frame_000000.rgb.png       8-bit RGB
    frame_000000.depth.png     16-bit grayscale, millimeters, 0 = invalid
    frame_000000.skel.json     joints, tracking states, face_detected
    frame_000000.mask.png      binary foreground

A corpus root groups sequences under ``train/`` and ``test/`` subdirectories.
Ground-truth tags are a tab-separated text file: ``sequence_id<TAB>t1,t2,...``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np
from PIL import Image

from reidkit.data.types import (
    AnnotatedImage,
    Calibration,
    Frame,
    GroundTruthTags,
    Joint,
    TrackingState,
    all_not_tracked_skeleton,
)
from reidkit.data.vocab import validate_tags
from reidkit.errors import LoadError, VocabularyError

_FRAME_RE = re.compile(r"frame_(\d{6})\.rgb\.png$")


def read_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            arr = np.asarray(im)
    except FileNotFoundError:
        raise LoadError(f"missing file {path}") from None
    except Exception as exc:
        raise LoadError(f"unreadable image {path}: {exc}") from None
    return arr


def write_png(path: Path, arr: np.ndarray):
    arr = np.ascontiguousarray(arr)
    im = Image.fromarray(arr)
    im.save(path, format="PNG")


def _read_json(path: Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise LoadError(f"missing file {path}") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"malformed JSON in {path}: {exc}") from None


def write_json(path: Path, obj):
    # sorted keys + fixed separators keep fixture output byte-reproducible
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_calibration(path: Path) -> Calibration:
    raw = _read_json(path)
    try:
        return Calibration(
            fx=float(raw["fx"]),
            fy=float(raw["fy"]),
            cx=float(raw["cx"]),
            cy=float(raw["cy"]),
            width=int(raw["width"]),
            height=int(raw["height"]),
        )
    except (KeyError, ValueError) as exc:
        raise LoadError(f"bad calibration in {path}: {exc}") from None


def _load_skeleton(path: Path) -> tuple[tuple[Joint, ...], bool]:
    raw = _read_json(path)
    try:
        joints = []
        for j in raw["joints"]:
            joints.append(
                Joint(
                    name=j["name"],
                    position3d=tuple(float(v) for v in j["position"]),
                    tracking_state=TrackingState(j["tracking_state"]),
                )
            )
        face = bool(raw["face_detected"])
    except (KeyError, ValueError) as exc:
        raise LoadError(f"bad skeleton in {path}: {exc}") from None
    return tuple(joints), face


def save_skeleton(path: Path, skeleton, face_detected: bool):
    write_json(
        path,
        {
            "face_detected": bool(face_detected),
            "joints": [
                {
                    "name": j.name,
                    "position": [float(v) for v in j.position3d],
                    "tracking_state": j.tracking_state.value,
                }
                for j in skeleton
            ],
        },
    )


def load_sequence(path: str | Path) -> list[Frame]:
    """Load every frame of one sequence directory, sorted by frame index."""
    path = Path(path)
    if not path.is_dir():
        raise LoadError(f"not a sequence directory: {path}")
    calib = load_calibration(path / "calib.json")
    indices = sorted(
        int(m.group(1)) for f in path.iterdir() if (m := _FRAME_RE.search(f.name))
    )
    frames = []
    for idx in indices:
        stem = path / f"frame_{idx:06d}"
        rgb = read_png(Path(f"{stem}.rgb.png"))
        depth = read_png(Path(f"{stem}.depth.png")).astype(np.uint16)
        mask = read_png(Path(f"{stem}.mask.png")) > 0
        skel_path = Path(f"{stem}.skel.json")
        if skel_path.exists():
            skeleton, face = _load_skeleton(skel_path)
        else:
            skeleton, face = all_not_tracked_skeleton(), False
        frame = Frame(
            rgb=rgb,
            depth=depth,
            person_mask=mask,
            skeleton=skeleton,
            face_detected=face,
            calibration=calib,
            sequence_id=path.name,
            frame_index=idx,
        )
        frame.validate(source=f"{stem}.rgb.png")
        frames.append(frame)
    return frames


def discover_corpus(root: str | Path) -> dict[str, list[Path]]:
    """List sequence directories under ``root/train`` and ``root/test``.

    A sequence directory is any directory containing a calib.json. Directories
    are returned sorted by name; frames are not loaded.
    """
    root = Path(root)
    out: dict[str, list[Path]] = {}
    for split in ("train", "test"):
        base = root / split
        if base.is_dir():
            out[split] = sorted(
                d for d in base.iterdir() if d.is_dir() and (d / "calib.json").exists()
            )
        else:
            out[split] = []
    return out


def load_ground_truth(path: str | Path) -> list[GroundTruthTags]:
    """Parse a tab-separated ground-truth tag file."""
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise LoadError(f"missing file {path}") from None
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise LoadError(f"{path}:{lineno}: expected sequence_id<TAB>tags")
        seq_id, tag_field = line.split("\t", 1)
        tags = [t.strip() for t in tag_field.split(",") if t.strip()]
        try:
            validated = validate_tags(tags)
        except VocabularyError as exc:
            raise VocabularyError(f"{path}:{lineno}: {exc}") from None
        records.append(GroundTruthTags(sequence_id=seq_id, tags=frozenset(validated)))
    return records


def save_ground_truth(path: str | Path, records: list[GroundTruthTags]):
    lines = [f"{r.sequence_id}\t{','.join(sorted(r.tags))}" for r in records]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def load_annotated_dir(path: str | Path) -> list[AnnotatedImage]:
    """Load a directory of annotated fashion images.

    Per image: ``<id>.rgb.png``, ``<id>.labels.png`` (16-bit label ids),
    ``<id>.tags.txt`` (one tag per line), ``<id>.pose.json`` (20x2 joint
    coordinates or null entries).
    """
    path = Path(path)
    out = []
    for rgb_path in sorted(path.glob("*.rgb.png")):
        image_id = rgb_path.name[: -len(".rgb.png")]
        rgb = read_png(rgb_path)
        labels = read_png(path / f"{image_id}.labels.png").astype(np.int64)
        if labels.shape != rgb.shape[:2]:
            raise LoadError(f"{path / image_id}: label map size does not match rgb")
        tags_file = path / f"{image_id}.tags.txt"
        tags = validate_tags(
            [t for t in tags_file.read_text("utf-8").split() if t], context=str(tags_file)
        )
        pose_raw = _read_json(path / f"{image_id}.pose.json")
        pose = np.array(
            [[np.nan, np.nan] if p is None else p for p in pose_raw["joints2d"]], dtype=float
        )
        out.append(AnnotatedImage(rgb=rgb, labels=labels, tags=tags, pose2d=pose, image_id=image_id))
    return out


def save_annotated(path: Path, img: AnnotatedImage):
    path.mkdir(parents=True, exist_ok=True)
    write_png(path / f"{img.image_id}.rgb.png", img.rgb)
    write_png(path / f"{img.image_id}.labels.png", img.labels.astype(np.uint16))
    (path / f"{img.image_id}.tags.txt").write_text(
        "\n".join(sorted(img.tags)) + "\n", "utf-8"
    )
    joints = [
        None if np.any(np.isnan(p)) else [float(p[0]), float(p[1])] for p in img.pose2d
    ]
    write_json(path / f"{img.image_id}.pose.json", {"joints2d": joints})
