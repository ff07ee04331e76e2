"""Softmax cross-entropy over 10-way one-hot targets."""

from __future__ import annotations

import numpy as np

from .errors import InvalidRangeError, ShapeMismatchError


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction stabilization."""
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _check_one_hot(targets: np.ndarray):
    ones = targets == 1.0
    zeros = targets == 0.0
    if not ((ones | zeros).all() and (ones.sum(axis=1) == 1).all()):
        raise InvalidRangeError("each target row must be one-hot (a single 1, rest 0)")


def softmax_xent(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood of the true class, plus dlogits.

    loss    = mean_b( -log softmax(logits)[b, true_b] )
    dlogits = (softmax(logits) - targets) / batch
    """
    if logits.shape != targets.shape or logits.ndim != 2:
        raise ShapeMismatchError(
            f"logits {logits.shape} and targets {targets.shape} must match as (batch, classes)"
        )
    _check_one_hot(targets)
    batch = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    true_z = (z * targets).sum(axis=1)
    loss = float(np.mean(log_norm - true_z))
    dlogits = (softmax(logits) - targets) / batch
    return loss, dlogits
