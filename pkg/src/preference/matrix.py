"""
Preference matrix assembly, consensus initialization and column deflation
"""
import logging
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import numpy as np

from ..config import CLAMP_EPS, LOAD_FLOOR_REL
from ..errors import EmptyPreference, InvalidParams
from ..geometry import soft_membership
from ..matlib import project_nonneg, write_matrix_csv
from ..models import Hypothesis, PreferenceMatrix

logger = logging.getLogger('preference')


def build_preference(data: Any, pool: List[Hypothesis], sigma: float) -> PreferenceMatrix:
    """(P)_ij = soft membership of datum i to hypothesis j; every column starts active"""
    if not sigma > 0:
        raise InvalidParams(f"sigma must be positive, got {sigma}")
    if not pool:
        raise InvalidParams("Empty hypothesis pool")

    family = pool[0].params.family
    X = family.validate_data(data)
    thetas = np.stack([h.params.theta for h in pool])
    distances = family.residual_matrix(thetas, X)
    P = soft_membership(distances, sigma)
    logger.debug(
        f"Preference matrix {P.shape[0]}x{P.shape[1]}, "
        f"{np.count_nonzero(P) / P.size:.1%} nonzero"
    )
    return PreferenceMatrix(P=P, hypotheses=list(pool), sigma=sigma, active=np.ones(len(pool), dtype=bool))


def largest_column(P: PreferenceMatrix) -> int:
    """Active column with the largest ℓ1 norm, lowest index on ties"""
    norms = np.where(P.active, P.P.sum(axis=0), 0.0)
    if norms.size == 0 or not norms.max() > 0:
        raise EmptyPreference("No active nonzero column")
    return int(np.argmax(norms))


def consensus_init(P: PreferenceMatrix, column: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Start from the largest consensus set:
    u0 = P[:, j*]/‖P[:, j*]‖∞, v0 = ‖P[:, j*]‖∞ · u0ᵀP/(u0ᵀu0)
    """
    j = largest_column(P) if column is None else column
    c = P.P[:, j]
    top = float(c.max())
    if not top > 0:
        raise EmptyPreference(f"Column {j} is zero")
    u0 = c / top
    v0 = top * (u0 @ P.P) / float(u0 @ u0)
    v0[np.abs(v0) < CLAMP_EPS] = 0.0
    return u0, project_nonneg(v0)


def deactivate_columns(P: PreferenceMatrix, mask: np.ndarray) -> PreferenceMatrix:
    """Zero and deactivate the masked columns; returns a new matrix"""
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        return P
    values = P.P.copy()
    values[:, mask] = 0.0
    return PreferenceMatrix(P=values, hypotheses=P.hypotheses, sigma=P.sigma, active=P.active & ~mask)


def deflate_columns(P: PreferenceMatrix, v: Any) -> PreferenceMatrix:
    """Columns whose load exceeds LOAD_FLOOR_REL · max(v) are zeroed and deactivated"""
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] != P.shape[1]:
        raise InvalidParams(f"Load vector has length {v.shape[0]}, expected {P.shape[1]}")
    top = float(v.max()) if v.size else 0.0
    if not top > 0:
        return P
    return deactivate_columns(P, v > LOAD_FLOOR_REL * top)


def active_submatrix(P: PreferenceMatrix) -> np.ndarray:
    return P.P[:, P.active]


def write_preference_csv(path: Union[str, Path], P: PreferenceMatrix) -> Path:
    """Active columns only; a single zero column stands in when none is active"""
    path = Path(path)
    values = active_submatrix(P)
    write_matrix_csv(path, values if values.shape[1] else np.zeros((P.shape[0], 1)))
    return path
