"""Combined likelihood and MAP label assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.data.vocab import load_vocabulary, null_id


@dataclass(frozen=True)
class ParseWeights:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("weights must be nonnegative")
        if self.lambda1 == 0 and self.lambda2 == 0:
            raise ValueError("weights cannot both be zero")


@dataclass
class ParseResult:
    label_map: np.ndarray  # (H, W) int32 vocabulary ids
    item_masks: dict[str, np.ndarray]  # non-null labels present in the map
    tau: frozenset[str]


def candidate_labels(tau: frozenset[str]) -> list[int]:
    """Vocabulary ids of the MAP candidates, in vocabulary order."""
    vocab = load_vocabulary()
    return [i for i, name in enumerate(vocab) if name in tau]


def _weighted_log(maps: np.ndarray, lam: float) -> np.ndarray:
    """lam * log(maps) with the 0 * log(0) := 0 convention."""
    if lam == 0:
        return np.zeros_like(maps)
    with np.errstate(divide="ignore"):
        return lam * np.log(maps)


def combined_log(global_stack: np.ndarray, transfer_stack: np.ndarray,
                 lam1: float, lam2: float) -> np.ndarray:
    """Log of Sg^l1 * St^l2, elementwise over (L, H, W) stacks."""
    return _weighted_log(global_stack, lam1) + _weighted_log(transfer_stack, lam2)


def combine_stacks(global_stack: np.ndarray, transfer_stack: np.ndarray,
                   weights: ParseWeights) -> np.ndarray:
    return combined_log(global_stack, transfer_stack, weights.lambda1, weights.lambda2)


def map_assign(log_likelihood: np.ndarray, label_ids: list[int],
               person_mask: np.ndarray) -> np.ndarray:
    """Per-pixel argmax over candidate labels; null outside the mask.

    label_ids must be in vocabulary order so argmax tie-breaking lands on the
    earliest vocabulary entry.
    """
    winner = np.argmax(log_likelihood, axis=0)
    out = np.asarray(label_ids, dtype=np.int32)[winner]
    out[~person_mask] = null_id()
    return out


def combine(s_global: dict[str, np.ndarray], s_transfer: dict[str, np.ndarray],
            weights: ParseWeights, tau: frozenset[str],
            person_mask: np.ndarray) -> ParseResult:
    vocab = load_vocabulary()
    ids = candidate_labels(tau)
    names = [vocab[i] for i in ids]
    gs = np.stack([s_global[n] for n in names])
    ts = np.stack([s_transfer[n] for n in names])
    loglik = combine_stacks(gs, ts, weights)
    label_map = map_assign(loglik, ids, person_mask)
    masks = {}
    for i, name in zip(ids, names):
        if name == "null":
            continue
        m = label_map == i
        if m.any():
            masks[name] = m
    return ParseResult(label_map=label_map, item_masks=masks, tau=tau)
