"""Histogram of oriented gradients over square cells.

Unsigned orientations on [0, 180) degrees, 9 bins, magnitude votes shared
bilinearly between the two nearest bin centers (circular over the unsigned
range). Blocks of 2x2 cells are L2-hys normalized (clip 0.2, renormalize);
a cell's final histogram is the average of its value in every block that
contains it, so the output stays one 9-vector per cell.
"""

import numpy as np

EPS = 1e-10


def gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient (gy, gx) with one-sided borders."""
    gray = np.asarray(gray, dtype=np.float64)
    gy, gx = np.gradient(gray)
    return gy, gx


def cell_histograms(gray: np.ndarray, cell_size: int = 8, bins: int = 9) -> np.ndarray:
    """Unnormalized per-cell orientation histograms, shape (cy, cx, bins).

    Pixels beyond the last full cell are ignored.
    """
    gy, gx = gradients(gray)
    mag = np.hypot(gx, gy)
    ang = np.mod(np.arctan2(gy, gx), np.pi)  # unsigned, [0, pi)

    h, w = gray.shape
    cy, cx = h // cell_size, w // cell_size
    if cy < 1 or cx < 1:
        raise ValueError(f"image {gray.shape} smaller than one {cell_size}x{cell_size} cell")
    h_used, w_used = cy * cell_size, cx * cell_size
    mag = mag[:h_used, :w_used]
    ang = ang[:h_used, :w_used]

    # continuous bin coordinate; centers at (i + 0.5) * pi / bins
    pos = ang * bins / np.pi - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    lo_bin = np.mod(lo, bins).astype(np.int64)
    hi_bin = np.mod(lo + 1, bins).astype(np.int64)

    cell_row = np.arange(h_used) // cell_size
    cell_col = np.arange(w_used) // cell_size
    cr = np.broadcast_to(cell_row[:, None], mag.shape)
    cc = np.broadcast_to(cell_col[None, :], mag.shape)

    hist = np.zeros((cy, cx, bins))
    flat_lo = (cr * cx + cc) * bins + lo_bin
    flat_hi = (cr * cx + cc) * bins + hi_bin
    np.add.at(hist.reshape(-1), flat_lo.ravel(), (mag * (1 - frac)).ravel())
    np.add.at(hist.reshape(-1), flat_hi.ravel(), (mag * frac).ravel())
    return hist


def _l2_hys(v: np.ndarray, clip: float) -> np.ndarray:
    n = np.sqrt(np.sum(v**2) + EPS**2)
    v = np.minimum(v / n, clip)
    n2 = np.sqrt(np.sum(v**2) + EPS**2)
    return v / n2


def hog(gray: np.ndarray, cell_size: int = 8, bins: int = 9, clip: float = 0.2) -> np.ndarray:
    """Block-normalized per-cell HOG, shape (cy, cx, bins).

    With fewer than 2 cells along an axis there is no complete 2x2 block and
    each cell is normalized on its own.
    """
    hist = cell_histograms(gray, cell_size, bins)
    cy, cx, _ = hist.shape
    out = np.zeros_like(hist)
    counts = np.zeros((cy, cx, 1))
    if cy < 2 or cx < 2:
        for r in range(cy):
            for c in range(cx):
                out[r, c] = _l2_hys(hist[r, c], clip)
        return out
    for r in range(cy - 1):
        for c in range(cx - 1):
            block = hist[r : r + 2, c : c + 2].reshape(-1)
            normed = _l2_hys(block, clip).reshape(2, 2, bins)
            out[r : r + 2, c : c + 2] += normed
            counts[r : r + 2, c : c + 2] += 1
    return out / counts


def hog_map(gray: np.ndarray, cell_size: int = 8, bins: int = 9) -> np.ndarray:
    """Per-pixel HOG channel: every pixel carries its cell's 9-vector.

    Pixels in the partial band beyond the last full cell reuse the nearest
    cell. Output (H, W, bins).
    """
    cells = hog(gray, cell_size, bins)
    h, w = gray.shape
    rows = np.minimum(np.arange(h) // cell_size, cells.shape[0] - 1)
    cols = np.minimum(np.arange(w) // cell_size, cells.shape[1] - 1)
    return cells[rows[:, None], cols[None, :]]
