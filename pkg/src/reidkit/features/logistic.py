"""One-vs-all L2-regularized logistic regression, full-batch gradient descent.

All classes train jointly on a shared design matrix; each class is an
independent binary problem. The step size adapts by backtracking so the total
loss (sum of per-class mean cross-entropies plus the ridge penalty) decreases
monotonically every epoch. Full-batch updates make the result independent of
sample order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.errors import DimensionError


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1p_exp(z: np.ndarray) -> np.ndarray:
    """log(1 + e^z), overflow-safe."""
    return np.where(z > 0, z + np.log1p(np.exp(-np.abs(z))), np.log1p(np.exp(-np.abs(z))))


def loss_and_grad(weights: np.ndarray, bias: np.ndarray, x: np.ndarray,
                  targets: np.ndarray, l2: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Total loss and gradients for stacked binary problems.

    weights (C, D), bias (C,), x (N, D), targets (C, N) in {0, 1}. Loss is
    sum over classes of mean cross-entropy, plus (l2/2) * ||weights||^2; the
    bias is not regularized.
    """
    n = x.shape[0]
    z = weights @ x.T + bias[:, None]  # (C, N)
    # mean BCE per class: mean(log(1+e^z) - t*z)
    loss = float(np.sum(_log1p_exp(z) - targets * z) / n + 0.5 * l2 * np.sum(weights**2))
    resid = sigmoid(z) - targets  # (C, N)
    grad_w = resid @ x / n + l2 * weights
    grad_b = resid.sum(axis=1) / n
    return loss, grad_w, grad_b


@dataclass
class TrainResult:
    weights: np.ndarray  # (C, D)
    bias: np.ndarray  # (C,)
    loss_history: list[float]


def train_one_vs_all(x: np.ndarray, targets: np.ndarray, *, l2: float = 1e-4,
                     max_epochs: int = 500, tol: float = 1e-8,
                     lr0: float = 1.0) -> TrainResult:
    """Fit all binary classifiers; stops when the loss change drops below tol.

    ``max_epochs=0`` returns the zero model (probability 0.5 everywhere).
    """
    x = np.asarray(x, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    n_classes = targets.shape[0]
    dim = x.shape[1]
    w = np.zeros((n_classes, dim))
    b = np.zeros(n_classes)
    history: list[float] = []
    if max_epochs == 0:
        return TrainResult(w, b, history)

    loss, gw, gb = loss_and_grad(w, b, x, targets, l2)
    history.append(loss)
    lr = lr0
    for _ in range(max_epochs):
        # backtracking: shrink until the full-batch step actually descends
        while True:
            w_new = w - lr * gw
            b_new = b - lr * gb
            new_loss, gw_new, gb_new = loss_and_grad(w_new, b_new, x, targets, l2)
            if new_loss <= loss:
                break
            if lr < 1e-16:  # flat to machine precision, give up
                return TrainResult(w, b, history)
            lr *= 0.5
        delta = loss - new_loss
        w, b, loss, gw, gb = w_new, b_new, new_loss, gw_new, gb_new
        history.append(loss)
        lr *= 1.2  # cautiously regrow after successful steps
        if delta < tol:
            break
    return TrainResult(w, b, history)


def predict_proba(weights: np.ndarray, bias: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Independent per-class sigmoid probabilities, shape (N, C)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != weights.shape[1]:
        raise DimensionError(
            f"feature dim {x.shape[-1]} does not match model dim {weights.shape[1]}"
        )
    return sigmoid(x @ weights.T + bias)
