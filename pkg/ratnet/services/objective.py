"""
Loss functions and classification accuracy.
"""

import logging
from typing import Tuple

import numpy as np

from ..exceptions import DataError, DimensionMismatchError, EmptyDatasetError
from ..utils.diffcore import as_matrix

logger = logging.getLogger(__name__)


def _check_labels(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    if logits.shape[0] == 0:
        raise EmptyDatasetError("Loss and accuracy need at least one sample")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.shape[0] != logits.shape[0]:
        raise DimensionMismatchError(f"Got {logits.shape[0]} logit rows but {labels.shape[0]} labels")
    if labels.min() < 0 or labels.max() >= logits.shape[1]:
        raise DataError(f"Labels must lie in [0, {logits.shape[1]}), got range [{labels.min()}, {labels.max()}]")
    return labels


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Mean softmax cross-entropy over the batch.

    Returns:
        (loss, dlogits) with dlogits = (softmax - onehot) / B
    """
    logits = as_matrix(logits, name="logits")
    labels = _check_labels(logits, labels)
    batch = logits.shape[0]
    rows = np.arange(batch)

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_norm - shifted[rows, labels]))

    dlogits = np.exp(shifted - log_norm[:, None])
    dlogits[rows, labels] -= 1.0
    dlogits /= batch
    return loss, dlogits


def accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose argmax equals the label; ties go to the lowest index."""
    logits = as_matrix(logits, name="logits")
    labels = _check_labels(logits, labels)
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def mean_squared_error(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean over all entries of (pred - target)^2 and its gradient w.r.t. pred."""
    pred = as_matrix(pred, name="predictions")
    target = as_matrix(target, name="targets")
    if pred.shape != target.shape:
        raise DimensionMismatchError(f"Prediction shape {pred.shape} differs from target shape {target.shape}")
    if pred.size == 0:
        raise EmptyDatasetError("Mean squared error needs at least one sample")
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size
