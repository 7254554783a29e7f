"""PCA compression of pooled appearance vectors, with persisted statistics.

The model file also carries the skeleton z-score statistics so that a single
artifact fixes every normalization constant needed at query time.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from reidkit.errors import DimensionError, FormatError, LoadError
from reidkit.skeleton import N_FEATURES as SKELETON_DIM
from reidkit.skeleton import SkeletonStats

MAGIC = b"RIDP"
VERSION = 1


@dataclass
class PcaModel:
    z_mean: np.ndarray  # (D,)
    z_std: np.ndarray  # (D,), zeros already replaced by 1
    mean: np.ndarray  # (D,) mean of z-scored training data
    components: np.ndarray  # (K, D), orthonormal rows
    explained_variance: np.ndarray  # (K,), nonincreasing
    skeleton_stats: SkeletonStats = field(
        default_factory=lambda: SkeletonStats(np.zeros(SKELETON_DIM), np.ones(SKELETON_DIM))
    )

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    @property
    def output_dim(self) -> int:
        return self.components.shape[0]

    def save(self, path: str | Path) -> None:
        d, k = self.input_dim, self.output_dim
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HII", VERSION, d, k))
            for arr in (self.z_mean, self.z_std, self.mean):
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.components, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.explained_variance, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.skeleton_stats.mean, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.skeleton_stats.std, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> PcaModel:
        try:
            blob = Path(path).read_bytes()
        except FileNotFoundError:
            raise LoadError(f"missing file {path}") from None
        if blob[:4] != MAGIC:
            raise FormatError(f"{path}: not a PCA model file")
        if len(blob) < 14:
            raise FormatError(f"{path}: truncated model file")
        (version, d, k) = struct.unpack_from("<HII", blob, 4)
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        need = 14 + 8 * (3 * d + k * d + k + 2 * SKELETON_DIM)
        if len(blob) < need:
            raise FormatError(f"{path}: truncated ({len(blob)} bytes, need {need})")

        off = 14

        def take(n):
            nonlocal off
            out = np.frombuffer(blob, dtype="<f8", count=n, offset=off).astype(np.float64)
            off += 8 * n
            return out

        z_mean, z_std, mean = take(d), take(d), take(d)
        components = take(k * d).reshape(k, d)
        explained = take(k)
        sk_mean, sk_std = take(SKELETON_DIM), take(SKELETON_DIM)
        return cls(z_mean, z_std, mean, components, explained,
                   SkeletonStats(sk_mean, sk_std))


def train_pca(descriptors: np.ndarray, k: int,
              skeleton_stats: SkeletonStats | None = None) -> PcaModel:
    """Fit z-score + PCA on row-stacked descriptors.

    Deterministic: components ordered by decreasing eigenvalue, each row's
    sign fixed so its largest-magnitude entry is positive.
    """
    x = np.asarray(descriptors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least 2 training descriptors")
    n, d = x.shape
    if not 1 <= k <= min(d, n - 1):
        raise ValueError(f"k={k} out of range for {n} samples of dim {d}")

    z_mean = x.mean(axis=0)
    z_std = x.std(axis=0)
    z_std[z_std == 0] = 1.0
    z = (x - z_mean) / z_std
    mean = z.mean(axis=0)
    centered = z - mean

    if d <= n:
        cov = centered.T @ centered / (n - 1)
        eigval, eigvec = np.linalg.eigh(cov)
        order = np.argsort(eigval)[::-1][:k]
        variance = eigval[order]
        comps = eigvec[:, order].T
    else:
        # tall case: eigenvectors of the Gram matrix span the same space
        # at N x N cost instead of D x D
        gram = centered @ centered.T / (n - 1)
        eigval, eigvec = np.linalg.eigh(gram)
        order = np.argsort(eigval)[::-1][:k]
        variance = eigval[order]
        comps = eigvec[:, order].T @ centered
        norms = np.linalg.norm(comps, axis=1)
        norms[norms == 0] = 1.0
        comps = comps / norms[:, None]

    variance = np.maximum(variance, 0.0)
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(z_mean, z_std, mean, np.ascontiguousarray(comps), variance,
                    skeleton_stats or SkeletonStats(np.zeros(SKELETON_DIM), np.ones(SKELETON_DIM)))


def compress(model: PcaModel, vector: np.ndarray) -> np.ndarray:
    """Project one pooled descriptor into the PCA subspace."""
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (model.input_dim,):
        raise DimensionError(
            f"descriptor has dim {v.shape}, model expects ({model.input_dim},)")
    z = (v - model.z_mean) / model.z_std
    return model.components @ (z - model.mean)


def identity_descriptor(clothing: np.ndarray, skeleton: np.ndarray,
                        skeleton_weight: float = 1.0) -> np.ndarray:
    """Concatenate the compressed clothing vector with the weighted skeleton vector."""
    return np.concatenate([np.asarray(clothing, dtype=np.float64),
                           skeleton_weight * np.asarray(skeleton, dtype=np.float64)])
