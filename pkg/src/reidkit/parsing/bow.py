"""Bag-of-words texture/color codebooks over superpixels.

Three channel groups (Lab color, texture histogram, gradient orientation)
each get their own k-means codebook; a superpixel's descriptor is the
concatenation of the three L1-normalized word histograms, so it sums to 3.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.errors import FormatError, LoadError
from reidkit.features import stack

MAGIC = b"RIDW"
VERSION = 1

GROUPS = tuple(stack.BOW_GROUPS)  # ("lab", "lbp", "gradient")


def kmeans_farthest(data: np.ndarray, k: int, iters: int = 25, seed: int = 0) -> np.ndarray:
    """Deterministic k-means: farthest-point init, then Lloyd iterations.

    The first center is the point closest to the data mean; each next center
    is the point farthest from its nearest chosen center (ties -> lowest
    index). Empty clusters keep their previous center.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("no samples for codebook training")
    k = min(k, n)
    centers = np.empty((k, x.shape[1]))
    d0 = np.linalg.norm(x - x.mean(axis=0), axis=1)
    centers[0] = x[np.argmin(d0)]
    mind = np.linalg.norm(x - centers[0], axis=1)
    for j in range(1, k):
        centers[j] = x[np.argmax(mind)]
        mind = np.minimum(mind, np.linalg.norm(x - centers[j], axis=1))
    for _ in range(iters):
        assign = nearest_word(x, centers)
        moved = False
        for j in range(k):
            sel = assign == j
            if sel.any():
                c = x[sel].mean(axis=0)
                if not np.array_equal(c, centers[j]):
                    centers[j] = c
                    moved = True
        if not moved:
            break
    return centers


def nearest_word(points: np.ndarray, centers: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Index of the closest center per point, ties toward the lower index."""
    out = np.empty(points.shape[0], dtype=np.int64)
    for s in range(0, points.shape[0], chunk):
        block = points[s:s + chunk]
        d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        out[s:s + chunk] = np.argmin(d2, axis=1)
    return out


@dataclass
class BowVocabulary:
    codebooks: dict[str, np.ndarray]  # group name -> (words, group dim)

    @property
    def n_bins(self) -> int:
        return sum(cb.shape[0] for cb in self.codebooks.values())

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HH", VERSION, len(GROUPS)))
            for name in GROUPS:
                cb = self.codebooks[name]
                fh.write(struct.pack("<II", cb.shape[0], cb.shape[1]))
                fh.write(np.ascontiguousarray(cb, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "BowVocabulary":
        try:
            blob = Path(path).read_bytes()
        except FileNotFoundError:
            raise LoadError(f"missing file {path}") from None
        if blob[:4] != MAGIC:
            raise FormatError(f"{path}: not a codebook file")
        if len(blob) < 8:
            raise FormatError(f"{path}: truncated codebook file")
        version, n_groups = struct.unpack_from("<HH", blob, 4)
        if version != VERSION or n_groups != len(GROUPS):
            raise FormatError(f"{path}: unsupported codebook header")
        off = 8
        books = {}
        try:
            for name in GROUPS:
                words, dim = struct.unpack_from("<II", blob, off)
                off += 8
                cb = np.frombuffer(blob, dtype="<f8", count=words * dim, offset=off)
                off += 8 * words * dim
                books[name] = cb.reshape(words, dim).astype(np.float64)
        except (struct.error, ValueError) as exc:
            raise FormatError(f"{path}: truncated codebook file") from exc
        return cls(books)


def train_bow(feature_images: list[np.ndarray], words: int = 50, seed: int = 0,
              max_pixels: int = 20000) -> BowVocabulary:
    """Fit per-group codebooks on pixels pooled across training images."""
    rng = np.random.default_rng(seed)
    books = {}
    for name in GROUPS:
        cols = stack.BOW_GROUPS[name]
        rows = [img[:, :, cols].reshape(-1, len(cols)) for img in feature_images]
        data = np.concatenate(rows)
        if data.shape[0] > max_pixels:
            pick = np.sort(rng.choice(data.shape[0], size=max_pixels, replace=False))
            data = data[pick]
        books[name] = kmeans_farthest(data, words, seed=seed)
    return BowVocabulary(books)


def bow_histograms(features: np.ndarray, labels: np.ndarray,
                   vocab: BowVocabulary) -> np.ndarray:
    """Per-superpixel BoW matrix (n_superpixels, n_bins), rows sum to 3."""
    h, w, _ = features.shape
    n_sp = int(labels.max()) + 1
    flat_labels = labels.ravel()
    if np.bincount(flat_labels, minlength=n_sp).min() == 0:
        raise ValueError("superpixel ids must be dense")
    chunks = []
    for name in GROUPS:
        cols = stack.BOW_GROUPS[name]
        cb = vocab.codebooks[name]
        assign = nearest_word(features[:, :, cols].reshape(-1, len(cols)), cb)
        words = cb.shape[0]
        hist = np.zeros((n_sp, words))
        np.add.at(hist, (flat_labels, assign), 1.0)
        hist /= hist.sum(axis=1, keepdims=True)
        chunks.append(hist)
    return np.concatenate(chunks, axis=1)
