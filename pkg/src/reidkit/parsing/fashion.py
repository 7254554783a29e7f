"""Fashion gallery: clothing descriptors + per-image superpixel data on disk.

Directory layout:

    index.ridg              descriptor index (entry id = image id)
    entries/<id>/spmap.png  16-bit superpixel id map
    entries/<id>/bow.bin    u32 count, u32 dim, count*dim f64 LE
    entries/<id>/tags.txt   one tag per line
    entries/<id>/parse.bin  u32 count, u32 labels, count*labels f64 LE
                            (mean global-parse probability per superpixel)
    entries/<id>/meta.json  pose bbox + superpixel centroids

The parse.bin rows cache the global model's output at enrollment time; after
retraining the global model, re-enroll the gallery.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.config import Config
from reidkit.data.io import read_png, write_json, write_png
from reidkit.data.types import AnnotatedImage
from reidkit.data.vocab import load_vocabulary, validate_tags
from reidkit.errors import FormatError, LoadError
from reidkit.features import stack
from reidkit.parsing import bow as bow_mod
from reidkit.parsing import segmentation
from reidkit.parsing.global_model import GlobalParseModel, parse_features
from reidkit.retrieval.gallery import GalleryEntry, load_gallery, save_gallery
from reidkit.retrieval.kdtree import KdIndex, build_index


@dataclass
class FashionEntry:
    image_id: int
    descriptor: np.ndarray
    tags: frozenset[str]
    centroids_norm: np.ndarray  # (n_sp, 2) pose-normalized (u, v)
    bow: np.ndarray  # (n_sp, bins)
    mean_probs: np.ndarray  # (n_sp, n_labels)


@dataclass
class FashionGallery:
    entries: list[FashionEntry]
    index: KdIndex

    @classmethod
    def from_entries(cls, entries: list[FashionEntry]) -> "FashionGallery":
        if not entries:
            raise ValueError("empty fashion gallery")
        return cls(entries=list(entries),
                   index=build_index(np.stack([e.descriptor for e in entries])))

    def tag_sets(self) -> list[frozenset[str]]:
        return [e.tags for e in self.entries]


def _write_matrix(path: Path, mat: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", mat.shape[0], mat.shape[1]))
        fh.write(np.ascontiguousarray(mat, dtype="<f8").tobytes())


def _read_matrix(path: Path) -> np.ndarray:
    try:
        blob = path.read_bytes()
    except FileNotFoundError:
        raise LoadError(f"missing file {path}") from None
    if len(blob) < 8:
        raise FormatError(f"{path}: truncated matrix file")
    count, dim = struct.unpack_from("<II", blob, 0)
    need = 8 + 8 * count * dim
    if len(blob) < need:
        raise FormatError(f"{path}: truncated matrix file")
    return np.frombuffer(blob, dtype="<f8", count=count * dim, offset=8).reshape(
        count, dim).astype(np.float64)


def build_fashion_entry(annotated: AnnotatedImage, image_id: int, descriptor: np.ndarray,
                        base_feats: np.ndarray, vocab_bow: bow_mod.BowVocabulary,
                        model: GlobalParseModel, config: Config | None = None,
                        ) -> tuple[FashionEntry, np.ndarray]:
    """Precompute everything the transfer stage needs for one image.

    Returns the entry plus its superpixel label map (persisted separately).
    """
    config = config or Config()
    vocab = load_vocabulary()
    labels = segmentation.oversegment(annotated.rgb, config.felz_k,
                                      config.felz_sigma, config.felz_min_size)
    sps = segmentation.superpixel_stats(labels, annotated.pose2d)
    bows = bow_mod.bow_histograms(base_feats, labels, vocab_bow)
    flat = parse_features(base_feats).reshape(-1, len(stack.GLOBAL_PARSE_INPUT))
    probs = model.probabilities(flat, list(range(len(vocab))))
    n_sp = len(sps)
    mean_probs = np.zeros((n_sp, len(vocab)))
    flat_labels = labels.ravel()
    counts = np.bincount(flat_labels, minlength=n_sp).astype(np.float64)
    for l in range(len(vocab)):
        sums = np.bincount(flat_labels, weights=probs[:, l], minlength=n_sp)
        mean_probs[:, l] = sums / counts
    entry = FashionEntry(
        image_id=image_id,
        descriptor=np.asarray(descriptor, dtype=np.float64),
        tags=frozenset(annotated.tags),
        centroids_norm=np.stack([sp.centroid_norm for sp in sps]),
        bow=bows,
        mean_probs=mean_probs,
    )
    return entry, labels


def save_fashion_gallery(root: str | Path, entries: list[FashionEntry],
                         spmaps: dict[int, np.ndarray]) -> None:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    save_gallery([GalleryEntry(e.image_id, str(e.image_id), e.descriptor)
                  for e in entries], root / "index.ridg")
    for e in entries:
        d = root / "entries" / str(e.image_id)
        d.mkdir(parents=True, exist_ok=True)
        write_png(d / "spmap.png", spmaps[e.image_id].astype(np.uint16))
        _write_matrix(d / "bow.bin", e.bow)
        _write_matrix(d / "parse.bin", e.mean_probs)
        (d / "tags.txt").write_text("".join(t + "\n" for t in sorted(e.tags)))
        write_json(d / "meta.json", {
            "centroids_norm": [[float(u), float(v)] for u, v in e.centroids_norm],
        })


def load_fashion_gallery(root: str | Path) -> FashionGallery:
    root = Path(root)
    gallery = load_gallery(root / "index.ridg")
    entries = []
    for ge in gallery:
        d = root / "entries" / str(ge.subject_id)
        if not d.is_dir():
            raise FormatError(f"{d}: missing fashion entry directory")
        tags = frozenset(t for t in (d / "tags.txt").read_text().splitlines() if t)
        validate_tags(tags, context=str(d / "tags.txt"))
        meta = json.loads((d / "meta.json").read_text())
        entries.append(FashionEntry(
            image_id=ge.subject_id,
            descriptor=ge.descriptor,
            tags=tags,
            centroids_norm=np.array(meta["centroids_norm"], dtype=np.float64).reshape(-1, 2),
            bow=_read_matrix(d / "bow.bin"),
            mean_probs=_read_matrix(d / "parse.bin"),
        ))
    return FashionGallery.from_entries(entries)
