"""Nonparametric label transfer from retrieved images via superpixel matching."""

from __future__ import annotations

import numpy as np

from reidkit.data.vocab import load_vocabulary


def tau_vector(tags: frozenset[str]) -> np.ndarray:
    """Boolean indicator over the vocabulary for a tag set."""
    vocab = load_vocabulary()
    out = np.zeros(len(vocab), dtype=bool)
    for i, name in enumerate(vocab):
        if name in tags:
            out[i] = True
    return out


def match_superpixel(query_centroid_norm: np.ndarray, query_bow: np.ndarray,
                     cand_centroids_norm: np.ndarray, cand_bow: np.ndarray,
                     radius: float = 0.25) -> int:
    """Corresponding superpixel in one retrieved image.

    Candidates lie within `radius` (pose-normalized units) of the query's
    centroid; the winner minimizes BoW L2 distance. With no candidate in
    range, the nearest centroid wins. All ties break toward the lower id.
    """
    if cand_centroids_norm.shape[0] == 0:
        raise ValueError("retrieved image has no superpixels")
    cdist = np.linalg.norm(cand_centroids_norm - query_centroid_norm, axis=1)
    in_range = np.nonzero(cdist <= radius)[0]
    if in_range.size == 0:
        return int(np.argmin(cdist))
    bdist = np.linalg.norm(cand_bow[in_range] - query_bow, axis=1)
    return int(in_range[np.argmin(bdist)])


def transfer_scores(query_centroids_norm: np.ndarray, query_bow: np.ndarray,
                    entries, tau_d: frozenset[str], radius: float = 0.25) -> np.ndarray:
    """Raw transferred likelihood per query superpixel and vocabulary label.

    For each retrieved entry the matched superpixel contributes its stored
    mean parse probabilities, masked by the entry's tags and damped by
    1 + BoW distance. No normalization here.
    """
    vocab = load_vocabulary()
    n_sp = query_centroids_norm.shape[0]
    raw = np.zeros((n_sp, len(vocab)))
    if not entries:
        raw[:, tau_vector(tau_d)] = 1.0
        return raw
    for entry in entries:
        mask = tau_vector(entry.tags)
        for i in range(n_sp):
            j = match_superpixel(query_centroids_norm[i], query_bow[i],
                                 entry.centroids_norm, entry.bow, radius)
            bow_dist = float(np.linalg.norm(query_bow[i] - entry.bow[j]))
            contrib = entry.mean_probs[j] * mask
            raw[i] += contrib / (1.0 + bow_dist)
    return raw


def normalize_scores(raw: np.ndarray) -> np.ndarray:
    """Scale each superpixel's scores so the best label sits at 1."""
    peak = raw.max(axis=1, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    return raw / safe


def transfer_parse(query_labels: np.ndarray, query_centroids_norm: np.ndarray,
                   query_bow: np.ndarray, entries, tau_d: frozenset[str],
                   radius: float = 0.25) -> dict[str, np.ndarray]:
    """Per-label transferred likelihood maps for a query oversegmentation."""
    vocab = load_vocabulary()
    scores = normalize_scores(
        transfer_scores(query_centroids_norm, query_bow, entries, tau_d, radius))
    return {name: scores[:, i][query_labels] for i, name in enumerate(vocab)}
