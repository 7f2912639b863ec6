"""
Misclassification error against ground-truth labels (0 = outlier)
"""
from typing import Any, List, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import InvalidParams, LengthMismatch
from ..geometry import soft_membership
from ..models import ModelParams


def labels_from_memberships(memberships: Any) -> np.ndarray:
    """Exclusive labels from an m × T membership matrix by the > 0 rule"""
    M = np.asarray(memberships, dtype=float)
    if M.ndim != 2:
        raise InvalidParams(f"Expected an m x T membership matrix, got {M.ndim} dimension(s)")
    if M.shape[1] == 0:
        return np.zeros(M.shape[0], dtype=int)
    # Memberships fall with distance, so the largest one is the closest model
    labels = np.argmax(M, axis=1) + 1
    labels[~(M > 0).any(axis=1)] = 0
    return labels


def labels_from_models(models: Sequence[ModelParams], data: Any, sigma: float) -> np.ndarray:
    """Exclusive labels induced by known models, e.g. the generating ones"""
    if not models:
        return np.zeros(len(data), dtype=int)
    X = models[0].family.validate_data(data)
    M = np.column_stack([
        soft_membership(p.family.residuals(p.theta, X), sigma) for p in models
    ])
    return labels_from_memberships(M)


def _as_labels(predicted: Any) -> np.ndarray:
    arr = np.asarray(predicted)
    if arr.ndim == 2:
        return labels_from_memberships(arr)
    return arr.astype(int).ravel()


def misclassification_error(predicted: Any, ground_truth: Sequence[int]) -> float:
    """
    Fraction of misclassified data after the best one-to-one matching of predicted
    to true groups; the outlier label 0 is never matched, only compared directly.
    """
    pred = _as_labels(predicted)
    truth = np.asarray(ground_truth).astype(int).ravel()
    if pred.shape[0] != truth.shape[0]:
        raise LengthMismatch(f"{pred.shape[0]} predicted labels vs {truth.shape[0]} ground-truth labels")
    m = truth.shape[0]
    if m == 0:
        return 0.0

    correct = int(np.count_nonzero((pred == 0) & (truth == 0)))
    pred_groups: List[int] = sorted(set(pred[pred != 0].tolist()))
    true_groups: List[int] = sorted(set(truth[truth != 0].tolist()))
    if pred_groups and true_groups:
        overlap = np.array([
            [np.count_nonzero((pred == p) & (truth == t)) for t in true_groups]
            for p in pred_groups
        ])
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        correct += int(overlap[rows, cols].sum())
    return 1.0 - correct / m
