"""Naming clothing colors with the eleven basic English color terms."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import numpy as np

from reidkit.features.color import rgb_to_lab

HIST_BINS = 16


@lru_cache(maxsize=1)
def load_anchors() -> tuple[tuple[str, ...], np.ndarray]:
    """(terms, rgb values) in file order; the order is the tie rule."""
    text = resources.files("reidkit.assets").joinpath("color_anchors.txt").read_text()
    terms = []
    rgbs = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        term, r, g, b = line.split()
        terms.append(term)
        rgbs.append((int(r), int(g), int(b)))
    return tuple(terms), np.array(rgbs, dtype=np.uint8)


@lru_cache(maxsize=1)
def _anchor_lab() -> np.ndarray:
    _, rgbs = load_anchors()
    return rgb_to_lab(rgbs.reshape(1, -1, 3)).reshape(-1, 3)


def dominant_color(rgb: np.ndarray, mask: np.ndarray) -> tuple[int, int, int]:
    """Most common coarse color over the mask.

    A 16x16x16 RGB histogram picks the dominant bin; the returned value is
    the mean RGB of the pixels in that bin. Bin-count ties go to the lowest
    flat bin index.
    """
    pixels = np.asarray(rgb)[np.asarray(mask, dtype=bool)]
    if pixels.size == 0:
        raise ValueError("empty item mask")
    step = 256 // HIST_BINS
    q = (pixels // step).astype(np.int64)
    flat = (q[:, 0] * HIST_BINS + q[:, 1]) * HIST_BINS + q[:, 2]
    counts = np.bincount(flat, minlength=HIST_BINS ** 3)
    win = int(np.argmax(counts))
    sel = pixels[flat == win].astype(np.float64)
    mean = sel.mean(axis=0)
    return tuple(int(round(v)) for v in mean)


def name_color(rgb_value: tuple[int, int, int], space: str = "lab") -> str:
    """Closest anchor term, CIE76 distance in Lab (or plain RGB distance)."""
    terms, anchor_rgb = load_anchors()
    value = np.array(rgb_value, dtype=np.uint8).reshape(1, 1, 3)
    if space == "lab":
        target = rgb_to_lab(value).reshape(3)
        d = np.linalg.norm(_anchor_lab() - target, axis=1)
    elif space == "rgb":
        d = np.linalg.norm(anchor_rgb.astype(np.float64)
                           - np.asarray(rgb_value, dtype=np.float64), axis=1)
    else:
        raise ValueError(f"unknown color space {space!r}")
    return terms[int(np.argmin(d))]


def item_color(rgb: np.ndarray, mask: np.ndarray, space: str = "lab") -> str:
    return name_color(dominant_color(rgb, mask), space)
