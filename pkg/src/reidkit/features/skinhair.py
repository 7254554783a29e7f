"""Skin and hair pixel detector: two one-vs-all logistic regressions."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.data.vocab import HAIR, SKIN, label_id
from reidkit.errors import DimensionError, FormatError, LoadError
from reidkit.features import stack
from reidkit.features.logistic import predict_proba, train_one_vs_all

MAGIC = b"RIDM"
VERSION = 1
CLASS_NAMES = (SKIN, HAIR)


@dataclass
class SkinHairModel:
    weights: np.ndarray  # (2, D), rows ordered (skin, hair)
    bias: np.ndarray  # (2,)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def likelihood(self, features: np.ndarray) -> np.ndarray:
        """Per-class sigmoid probabilities in [0, 1], shape (N, 2).

        Classes are independent (one-vs-all), not softmax-coupled.
        """
        return predict_proba(self.weights, self.bias, features)

    def save(self, path: str | Path):
        dim = self.dim
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HHI", VERSION, len(CLASS_NAMES), dim))
            for c in range(len(CLASS_NAMES)):
                fh.write(struct.pack("<d", self.bias[c]))
                fh.write(self.weights[c].astype("<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> SkinHairModel:
        try:
            blob = Path(path).read_bytes()
        except FileNotFoundError:
            raise LoadError(f"missing file {path}") from None
        if blob[:4] != MAGIC:
            raise FormatError(f"{path}: bad magic {blob[:4]!r}")
        try:
            version, n_classes, dim = struct.unpack_from("<HHI", blob, 4)
        except struct.error:
            raise FormatError(f"{path}: truncated header") from None
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        need = 12 + n_classes * 8 * (dim + 1)
        if len(blob) < need:
            raise FormatError(f"{path}: truncated payload")
        weights = np.empty((n_classes, dim))
        bias = np.empty(n_classes)
        off = 12
        for c in range(n_classes):
            (bias[c],) = struct.unpack_from("<d", blob, off)
            off += 8
            weights[c] = np.frombuffer(blob, dtype="<f8", count=dim, offset=off)
            off += 8 * dim
        return cls(weights=weights, bias=bias)


def train_skin_hair(annotated, feature_fn, *, l2: float = 1e-4, max_epochs: int = 500,
                    tol: float = 1e-8, max_pixels: int = 50000, seed: int = 0) -> SkinHairModel:
    """Train the detector from annotated images.

    ``feature_fn(image) -> (H, W, >=71)`` supplies the pixel features; only
    the base channels are consumed. Raises if either class has no pixels.
    ``max_pixels`` caps the training set by deterministic subsampling.
    """
    skin_id, hair_id = label_id(SKIN), label_id(HAIR)
    xs, ys = [], []
    for img in annotated:
        feats = feature_fn(img)[:, :, : stack.N_BASE_CHANNELS]
        labels = img.labels
        xs.append(feats.reshape(-1, stack.N_BASE_CHANNELS))
        y = np.stack([labels.ravel() == skin_id, labels.ravel() == hair_id])
        ys.append(y)
    x = np.concatenate(xs, axis=0)
    t = np.concatenate(ys, axis=1).astype(np.float64)
    for name, row in zip(CLASS_NAMES, t):
        if not row.any():
            raise ValueError(f"no {name} pixels in the annotated corpus")
    if x.shape[0] > max_pixels:
        keep = np.random.default_rng(seed).choice(x.shape[0], size=max_pixels, replace=False)
        keep.sort()
        x, t = x[keep], t[:, keep]
    result = train_one_vs_all(x, t, l2=l2, max_epochs=max_epochs, tol=tol)
    return SkinHairModel(weights=result.weights, bias=result.bias)
