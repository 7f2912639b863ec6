"""
Dense matrix and vector helpers
Validation, norms, products and the nonnegative projection
"""
from typing import Any

import numpy as np

from ..errors import InvalidParams, NegativeEntry


def as_matrix(data: Any) -> np.ndarray:
    """Copy into a finite float64 matrix with at least one row and column"""
    A = np.array(data, dtype=float)
    if A.ndim != 2:
        raise InvalidParams(f"Expected a 2-D matrix, got {A.ndim} dimension(s)")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidParams(f"Matrix must be at least 1x1, got {A.shape[0]}x{A.shape[1]}")
    if not np.all(np.isfinite(A)):
        raise InvalidParams("Matrix has NaN or infinite entries")
    return A


def as_vector(data: Any) -> np.ndarray:
    """Copy into a finite float64 vector"""
    x = np.array(data, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidParams("Vector has NaN or infinite entries")
    return x


def require_nonnegative(A: np.ndarray):
    """Raise NegativeEntry at the first negative entry (row-major order)"""
    negative = np.argwhere(A < 0)
    if len(negative):
        row, col = (int(i) for i in negative[0])
        raise NegativeEntry(row, col, float(A[row, col]))


def project_nonneg(B: np.ndarray) -> np.ndarray:
    """Entrywise max(B, 0); shape preserved, input untouched"""
    return np.maximum(B, 0.0)


def frobenius_norm(B: np.ndarray) -> float:
    return float(np.linalg.norm(B))


def inf_norm(v: np.ndarray) -> float:
    """Largest absolute entry"""
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x, y))


def outer(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.outer(x, y)


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return A @ x


def vecmat(x: np.ndarray, A: np.ndarray) -> np.ndarray:
    return x @ A
