"""Rotation-invariant LBP histogram Fourier texture descriptor.

8 neighbors at radius 1 give 256 raw codes. Uniform codes (at most two
circular 0/1 transitions) split into the all-zeros and all-ones codes plus 7
orbits, one per one-bit count n = 1..7; each orbit holds the 8 rotations of a
contiguous run of n ones. Rotating the input image cyclically shifts every
orbit, so DFT magnitudes along each orbit are rotation invariant.

Descriptor layout (38 values):
    [ |H_1(0..4)|, ..., |H_7(0..4)|, h(all zeros), h(all ones), h(non-uniform) ]

where H_n is the length-8 DFT of orbit n's histogram row and only the first 5
magnitudes are kept (the rest repeat by conjugate symmetry). The histogram is
normalized to sum 1 before the transform.
"""

import numpy as np

from reidkit import kernels

N_NEIGHBORS = 8
N_BINS = 59  # 56 orbit cells + all-zeros + all-ones + non-uniform
N_HF = 38
# bin ids for the special codes
BIN_ALL_ZEROS = 56
BIN_ALL_ONES = 57
BIN_NON_UNIFORM = 58


def _rotate_left(code: int, r: int) -> int:
    return ((code << r) | (code >> (N_NEIGHBORS - r))) & 0xFF


def _transitions(code: int) -> int:
    prev = code & 1
    t = 0
    for k in range(1, N_NEIGHBORS + 1):
        bit = (code >> (k % N_NEIGHBORS)) & 1
        t += bit != prev
        prev = bit
    return t


def _build_bin_table() -> np.ndarray:
    """code -> histogram bin; orbit cell (n, r) maps to bin (n-1)*8 + r."""
    table = np.full(256, BIN_NON_UNIFORM, dtype=np.int64)
    table[0] = BIN_ALL_ZEROS
    table[255] = BIN_ALL_ONES
    for n in range(1, N_NEIGHBORS):
        base = (1 << n) - 1  # run of n ones starting at bit 0
        for r in range(N_NEIGHBORS):
            table[_rotate_left(base, r)] = (n - 1) * N_NEIGHBORS + r
    return table


BIN_TABLE = _build_bin_table()
assert all(_transitions(c) <= 2 for c in np.flatnonzero(BIN_TABLE < BIN_NON_UNIFORM))


def code_histogram(codes: np.ndarray) -> np.ndarray:
    """59-bin uniform-pattern histogram of raw LBP codes, normalized to sum 1."""
    counts = np.bincount(BIN_TABLE[codes.ravel()], minlength=N_BINS).astype(np.float64)
    total = counts.sum()
    if total > 0:
        counts /= total
    return counts


def histogram_to_hf(hist: np.ndarray) -> np.ndarray:
    """Map one or more 59-bin histograms (..., 59) to 38 Fourier features."""
    hist = np.asarray(hist, dtype=np.float64)
    orbits = hist[..., :56].reshape(*hist.shape[:-1], 7, 8)
    mags = np.abs(np.fft.rfft(orbits, axis=-1))  # (..., 7, 5)
    flat = mags.reshape(*hist.shape[:-1], 35)
    return np.concatenate([flat, hist[..., 56:]], axis=-1)


def lbp_hf(gray: np.ndarray, window: tuple[int, int, int, int] | None = None) -> np.ndarray:
    """38-dim rotation-invariant texture descriptor of a grayscale window.

    ``window`` is (row0, col0, height, width); None takes the whole image.
    Codes are computed for interior pixels of the window only.
    """
    gray = np.asarray(gray, dtype=np.float64)
    if window is not None:
        r0, c0, h, w = window
        if r0 < 0 or c0 < 0 or r0 + h > gray.shape[0] or c0 + w > gray.shape[1]:
            raise ValueError("window extends outside the image")
        gray = gray[r0 : r0 + h, c0 : c0 + w]
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise ValueError(f"window {gray.shape} is smaller than 3x3")
    codes = kernels.lbp_codes(gray)
    return histogram_to_hf(code_histogram(codes))


def lbp_hf_map(gray: np.ndarray, window_size: int = 15) -> np.ndarray:
    """Per-pixel 38-dim LBP-HF over a square sliding window.

    Windows are clipped at the image border; each histogram is normalized by
    the number of codes it covers. Output is (H, W, 38).
    """
    from scipy.ndimage import uniform_filter

    gray = np.asarray(gray, dtype=np.float64)
    h, w = gray.shape
    codes = kernels.lbp_codes(gray)
    bins = BIN_TABLE[codes]
    # windowed counts per histogram bin on the interior grid, then divide by
    # the windowed count of valid code pixels
    onehot = np.zeros((N_BINS, h - 2, w - 2), dtype=np.float64)
    idx0, idx1 = np.indices(bins.shape)
    onehot[bins, idx0, idx1] = 1.0
    hists = np.empty((h - 2, w - 2, N_BINS))
    scale = float(window_size * window_size)
    for b in range(N_BINS):
        hists[:, :, b] = uniform_filter(onehot[b], size=window_size, mode="constant") * scale
    valid = uniform_filter(np.ones((h - 2, w - 2)), size=window_size, mode="constant") * scale
    hists /= valid[:, :, None]
    out_interior = histogram_to_hf(hists)
    out = np.zeros((h, w, N_HF))
    out[1:-1, 1:-1] = out_interior
    # border pixels have no code of their own; copy the nearest interior value
    out[0] = out[1]
    out[-1] = out[-2]
    out[:, 0] = out[:, 1]
    out[:, -1] = out[:, -2]
    return out
