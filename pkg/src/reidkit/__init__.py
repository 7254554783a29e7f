"""Soft-biometric person re-identification from RGB-D video.

The package covers the full loop: per-frame appearance + skeleton descriptors,
PCA compression, KD-tree galleries, clothing parsing with semantic color names,
and a small TCP service for thin clients.
"""

from reidkit.config import Config
from reidkit.errors import (
    DegenerateSkeletonError,
    DimensionError,
    FormatError,
    LoadError,
    ProtocolError,
    ReidError,
    VocabularyError,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ReidError",
    "LoadError",
    "FormatError",
    "DimensionError",
    "DegenerateSkeletonError",
    "VocabularyError",
    "ProtocolError",
    "__version__",
]
