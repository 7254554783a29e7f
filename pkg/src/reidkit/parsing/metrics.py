"""Evaluation metrics: tag precision/recall/F1 and the CMC curve."""

from __future__ import annotations

import numpy as np

STRUCTURAL = frozenset({"skin", "hair", "null"})


def evaluate_tags(predicted: frozenset[str] | set[str],
                  truth: frozenset[str] | set[str]) -> tuple[float, float, float]:
    """Set precision/recall/F1 over clothing tags.

    skin/hair/null are structural labels, not predictions, and are ignored on
    both sides. Empty denominators score 0.
    """
    pred = set(predicted) - STRUCTURAL
    true = set(truth) - STRUCTURAL
    hit = len(pred & true)
    precision = hit / len(pred) if pred else 0.0
    recall = hit / len(true) if true else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def cmc_curve(rankings: list[list[int]], truth: list[int]) -> np.ndarray:
    """Cumulative match characteristic.

    rankings[i] is the ranked subject-id list for probe i; output[k-1] is the
    fraction of probes whose true subject appears within the top k. Probes
    whose subject never appears count as misses at every rank.
    """
    if len(rankings) != len(truth):
        raise ValueError("one ranking per probe required")
    max_rank = max((len(r) for r in rankings), default=0)
    hits = np.zeros(max_rank)
    for ranked, true_id in zip(rankings, truth):
        if true_id in ranked:
            hits[ranked.index(true_id):] += 1
    return hits / len(rankings) if rankings else hits


def rank1_accuracy(rankings: list[list[int]], truth: list[int]) -> float:
    curve = cmc_curve(rankings, truth)
    return float(curve[0]) if curve.size else 0.0
