"""Per-label logistic regressions over pixel features (the global parse)."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.data.types import AnnotatedImage
from reidkit.data.vocab import load_vocabulary
from reidkit.errors import DimensionError, FormatError, LoadError
from reidkit.features import stack
from reidkit.features.logistic import sigmoid, train_one_vs_all

MAGIC = b"RIDL"
VERSION = 1


@dataclass
class GlobalParseModel:
    weights: np.ndarray  # (n_labels, D)
    bias: np.ndarray  # (n_labels,)
    trained: np.ndarray  # (n_labels,) bool; False = no positive pixels seen

    @property
    def n_labels(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def label_probability(self, features: np.ndarray, label: int) -> np.ndarray:
        """P(y = label | x) per row of a (N, D) feature matrix."""
        if features.shape[1] != self.dim:
            raise DimensionError(
                f"features have dim {features.shape[1]}, model expects {self.dim}")
        if not self.trained[label]:
            return np.zeros(features.shape[0])
        return sigmoid(features @ self.weights[label] + self.bias[label])

    def probabilities(self, features: np.ndarray, labels: list[int]) -> np.ndarray:
        """(N, len(labels)) matrix of per-label probabilities."""
        return np.stack([self.label_probability(features, l) for l in labels], axis=1)

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HHI", VERSION, self.n_labels, self.dim))
            for l in range(self.n_labels):
                fh.write(struct.pack("<Bd", int(self.trained[l]), float(self.bias[l])))
                fh.write(np.ascontiguousarray(self.weights[l], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "GlobalParseModel":
        try:
            blob = Path(path).read_bytes()
        except FileNotFoundError:
            raise LoadError(f"missing file {path}") from None
        if blob[:4] != MAGIC:
            raise FormatError(f"{path}: not a parse model file")
        if len(blob) < 12:
            raise FormatError(f"{path}: truncated model file")
        version, n_labels, dim = struct.unpack_from("<HHI", blob, 4)
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        need = 12 + n_labels * (9 + 8 * dim)
        if len(blob) < need:
            raise FormatError(f"{path}: truncated model file")
        weights = np.empty((n_labels, dim))
        bias = np.empty(n_labels)
        trained = np.empty(n_labels, dtype=bool)
        off = 12
        for l in range(n_labels):
            t, b = struct.unpack_from("<Bd", blob, off)
            off += 9
            trained[l] = bool(t)
            bias[l] = b
            weights[l] = np.frombuffer(blob, dtype="<f8", count=dim, offset=off)
            off += 8 * dim
        return cls(weights, bias, trained)


def parse_features(base: np.ndarray) -> np.ndarray:
    """Select the channels the parse models see (color, texture, shape, pose)."""
    return base[:, :, stack.GLOBAL_PARSE_INPUT]


def train_global(annotated: list[AnnotatedImage], feature_images: list[np.ndarray],
                 l2: float = 1e-4, max_epochs: int = 500, tol: float = 1e-8,
                 max_pixels: int = 60000, seed: int = 0) -> GlobalParseModel:
    """One-vs-all logistic regression per vocabulary label.

    Labels with no positive pixel anywhere in the corpus are left untrained
    (flagged, probability fixed at 0). Pixels are pooled across images and
    subsampled deterministically when the pool exceeds max_pixels.
    """
    vocab = load_vocabulary()
    xs, ys = [], []
    for img, feats in zip(annotated, feature_images):
        sel = parse_features(feats).reshape(-1, len(stack.GLOBAL_PARSE_INPUT))
        xs.append(sel)
        ys.append(img.labels.ravel())
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    if x.shape[0] > max_pixels:
        pick = np.sort(np.random.default_rng(seed).choice(
            x.shape[0], size=max_pixels, replace=False))
        x, y = x[pick], y[pick]
    present = np.zeros(len(vocab), dtype=bool)
    present[np.unique(y)] = True
    active = np.nonzero(present)[0]
    targets = np.stack([(y == l).astype(np.float64) for l in active])
    result = train_one_vs_all(x, targets, l2=l2, max_epochs=max_epochs, tol=tol)
    weights = np.zeros((len(vocab), x.shape[1]))
    bias = np.zeros(len(vocab))
    weights[active] = result.weights
    bias[active] = result.bias
    return GlobalParseModel(weights, bias, present)


def global_parse(model: GlobalParseModel, feature_image: np.ndarray,
                 tau: frozenset[str]) -> dict[str, np.ndarray]:
    """Per-label probability maps masked by the predicted attribute set.

    Labels outside tau get an all-zero map (hard indicator).
    """
    vocab = load_vocabulary()
    h, w, _ = feature_image.shape
    flat = parse_features(feature_image).reshape(-1, len(stack.GLOBAL_PARSE_INPUT))
    out = {}
    for label_id, name in enumerate(vocab):
        if name in tau:
            out[name] = model.label_probability(flat, label_id).reshape(h, w)
        else:
            out[name] = np.zeros((h, w))
    return out
