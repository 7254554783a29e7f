"""Identity gallery: persistence, subject identification, tag voting."""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.errors import DimensionError, FormatError, LoadError
from reidkit.retrieval.kdtree import KdIndex, build_index

MAGIC = b"RIDG"
VERSION = 1


@dataclass(frozen=True)
class GalleryEntry:
    subject_id: int
    name: str
    descriptor: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, GalleryEntry):
            return NotImplemented
        return (self.subject_id == other.subject_id and self.name == other.name
                and np.array_equal(self.descriptor, other.descriptor))


def save_gallery(entries: list[GalleryEntry], path: str | Path) -> None:
    if entries:
        dim = entries[0].descriptor.shape[0]
        for e in entries:
            if e.descriptor.shape != (dim,):
                raise DimensionError(
                    f"entry {e.subject_id} has dim {e.descriptor.shape[0]}, gallery uses {dim}")
    else:
        dim = 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HII", VERSION, dim, len(entries)))
        for e in entries:
            raw = e.name.encode("utf-8")
            fh.write(struct.pack("<IH", e.subject_id, len(raw)))
            fh.write(raw)
            fh.write(np.ascontiguousarray(e.descriptor, dtype="<f8").tobytes())


def load_gallery(path: str | Path) -> list[GalleryEntry]:
    try:
        blob = Path(path).read_bytes()
    except FileNotFoundError:
        raise LoadError(f"missing file {path}") from None
    if blob[:4] != MAGIC:
        raise FormatError(f"{path}: not a gallery file")
    if len(blob) < 14:
        raise FormatError(f"{path}: truncated gallery file")
    version, dim, count = struct.unpack_from("<HII", blob, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    off = 14
    entries = []
    try:
        for _ in range(count):
            subject_id, name_len = struct.unpack_from("<IH", blob, off)
            off += 6
            name = blob[off:off + name_len].decode("utf-8")
            if len(blob[off:off + name_len]) != name_len:
                raise FormatError(f"{path}: truncated entry name")
            off += name_len
            desc = np.frombuffer(blob, dtype="<f8", count=dim, offset=off).astype(np.float64)
            off += 8 * dim
            entries.append(GalleryEntry(subject_id, name, desc))
    except (struct.error, ValueError) as exc:
        raise FormatError(f"{path}: truncated gallery file") from exc
    return entries


@dataclass
class Gallery:
    entries: list[GalleryEntry]
    index: KdIndex

    @classmethod
    def from_entries(cls, entries: list[GalleryEntry]) -> "Gallery":
        if not entries:
            raise ValueError("empty gallery")
        points = np.stack([e.descriptor for e in entries])
        return cls(entries=list(entries), index=build_index(points))

    @property
    def dim(self) -> int:
        return self.index.dim


def identify(gallery: Gallery, descriptor: np.ndarray, k: int) -> list[tuple[int, str, float]]:
    """Ranked unique subjects: KNN over enrollment vectors, best distance per
    subject, ordered by (distance, subject id)."""
    ids, dists = gallery.index.knn(descriptor, k)
    best: dict[int, tuple[float, str]] = {}
    for row, dist in zip(ids, dists):
        e = gallery.entries[row]
        if e.subject_id not in best or dist < best[e.subject_id][0]:
            best[e.subject_id] = (float(dist), e.name)
    ranked = sorted(((d, sid, name) for sid, (d, name) in best.items()))
    return [(sid, name, d) for d, sid, name in ranked]


def rank_subjects(gallery: Gallery, descriptor: np.ndarray) -> list[tuple[int, str, float]]:
    """Full subject ranking (KNN with K = gallery size)."""
    return identify(gallery, descriptor, gallery.index.size)


def vote_tags(tag_sets: list[frozenset[str]], vote_min: int) -> frozenset[str]:
    counts = Counter(tag for tags in tag_sets for tag in set(tags))
    voted = {tag for tag, c in counts.items() if c >= vote_min}
    return frozenset(voted | {"skin", "hair", "null"})


def retrieve_tags(index: KdIndex, tag_sets: list[frozenset[str]],
                  descriptor: np.ndarray, k: int = 25, vote_min: int = 2) -> frozenset[str]:
    """Predicted attribute set: tags on >= vote_min of the K nearest entries,
    plus the always-on skin/hair/null labels."""
    ids, _ = index.knn(descriptor, k)
    return vote_tags([tag_sets[i] for i in ids], vote_min)
