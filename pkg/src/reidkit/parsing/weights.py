"""Simplex search for the two likelihood exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.parsing.combine import ParseWeights, combined_log, map_assign

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5
MAX_ITERS = 100
DIAMETER_TOL = 1e-3
INIT_SIMPLEX = ((1.0, 1.0), (1.5, 1.0), (1.0, 1.5))


@dataclass
class ParseInstance:
    """One training image with everything precomputed for fast re-scoring."""

    global_stack: np.ndarray  # (L, H, W)
    transfer_stack: np.ndarray  # (L, H, W)
    label_ids: list[int]  # vocabulary ids, vocabulary order
    truth: np.ndarray  # (H, W) ground-truth vocabulary ids
    foreground: np.ndarray  # (H, W) bool
    person_mask: np.ndarray  # (H, W) bool


def foreground_accuracy(instances: list[ParseInstance], lam1: float, lam2: float) -> float:
    """Fraction of foreground pixels the MAP assignment labels correctly."""
    correct = 0
    total = 0
    for inst in instances:
        loglik = combined_log(inst.global_stack, inst.transfer_stack, lam1, lam2)
        labels = map_assign(loglik, inst.label_ids, inst.person_mask)
        sel = inst.foreground
        correct += int((labels[sel] == inst.truth[sel]).sum())
        total += int(sel.sum())
    return correct / total if total else 0.0


def optimize_weights(instances: list[ParseInstance]) -> tuple[ParseWeights, float]:
    """Nelder-Mead over the two exponents, maximizing foreground accuracy.

    Fixed protocol: simplex starts at (1,1), (1.5,1), (1,1.5); standard
    reflect/expand/contract/shrink coefficients; stops after 100 iterations
    or when the simplex diameter drops below 1e-3; proposals with negative
    coordinates are clamped to 0; the best vertex ever evaluated is returned
    even if a later simplex drifted away from it.
    """
    if not instances:
        raise ValueError("empty corpus")

    best: tuple[float, tuple[float, float]] | None = None

    def evaluate(pt: np.ndarray) -> float:
        nonlocal best
        pt = np.maximum(pt, 0.0)
        acc = foreground_accuracy(instances, float(pt[0]), float(pt[1]))
        if best is None or acc > best[0]:
            best = (acc, (float(pt[0]), float(pt[1])))
        return -acc

    simplex = [np.array(v) for v in INIT_SIMPLEX]
    values = [evaluate(v) for v in simplex]

    for _ in range(MAX_ITERS):
        diam = max(np.linalg.norm(a - b) for a in simplex for b in simplex)
        if diam < DIAMETER_TOL:
            break
        order = sorted(range(3), key=lambda i: (values[i], i))
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        centroid = (simplex[0] + simplex[1]) / 2.0

        reflected = np.maximum(centroid + REFLECT * (centroid - simplex[2]), 0.0)
        fr = evaluate(reflected)
        if fr < values[0]:
            expanded = np.maximum(centroid + EXPAND * (reflected - centroid), 0.0)
            fe = evaluate(expanded)
            if fe < fr:
                simplex[2], values[2] = expanded, fe
            else:
                simplex[2], values[2] = reflected, fr
        elif fr < values[1]:
            simplex[2], values[2] = reflected, fr
        else:
            if fr < values[2]:
                contracted = np.maximum(centroid + CONTRACT * (reflected - centroid), 0.0)
            else:
                contracted = np.maximum(centroid + CONTRACT * (simplex[2] - centroid), 0.0)
            fc = evaluate(contracted)
            if fc < min(fr, values[2]):
                simplex[2], values[2] = contracted, fc
            else:
                for i in (1, 2):
                    simplex[i] = np.maximum(
                        simplex[0] + SHRINK * (simplex[i] - simplex[0]), 0.0)
                    values[i] = evaluate(simplex[i])

    acc, (l1, l2) = best
    if l1 == 0 and l2 == 0:
        l1 = 1e-12
    return ParseWeights(l1, l2), acc
