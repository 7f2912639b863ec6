"""
Two-view models on correspondences (x, y, x′, y′)
Both families are estimated by normalized direct linear transforms: each
image is translated to its centroid and scaled to mean distance √2 first.
"""
from itertools import combinations
from typing import Optional, Tuple

import numpy as np

from ..config import DEGENERACY_REL
from ..errors import DegenerateSample, SingularModel
from ..models import ModelParams
from .base import ModelFamily

# Condition number above which H⁻¹ is not trusted
SINGULAR_COND = 1e12


def hartley_transform(points: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """3 × 3 similarity moving the (weighted) centroid to 0 and the mean distance to √2"""
    w = np.ones(len(points)) if weights is None else weights
    centroid = w @ points / w.sum()
    spread = float(w @ np.linalg.norm(points - centroid, axis=1) / w.sum())
    if not spread > 0:
        raise DegenerateSample("all points coincide")
    s = np.sqrt(2.0) / spread
    return np.array([
        [s, 0.0, -s * centroid[0]],
        [0.0, s, -s * centroid[1]],
        [0.0, 0.0, 1.0]
    ])


def homogeneous(points: np.ndarray) -> np.ndarray:
    return np.column_stack([points, np.ones(len(points))])


def apply_transform(T: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Inhomogeneous image of points under T; points mapped to infinity come back as inf"""
    h = homogeneous(points) @ T.T
    with np.errstate(divide='ignore', invalid='ignore'):
        out = h[:, :2] / h[:, 2:3]
    out[~np.isfinite(out)] = np.inf
    return out


def canonical_matrix(M: np.ndarray) -> np.ndarray:
    """Unit Frobenius norm, largest-magnitude entry positive"""
    M = M / np.linalg.norm(M)
    flat = M.ravel()
    return -M if flat[int(np.argmax(np.abs(flat)))] < 0 else M


def _split(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return X[:, :2], X[:, 2:]


def _null_vector(rows: np.ndarray, minimal: bool, unknowns: int) -> np.ndarray:
    """Right singular vector of the smallest singular value; minimal systems must have a 1-D null space"""
    _, s, vt = np.linalg.svd(rows)
    if minimal and s[unknowns - 2] < DEGENERACY_REL * s[0]:
        raise DegenerateSample("rank-deficient linear system")
    return vt[-1]


def _collinear(points: np.ndarray) -> bool:
    bbox = float(np.max(np.ptp(points, axis=0)))
    if not bbox > 0:
        return True
    for i, j, k in combinations(range(len(points)), 3):
        ab, ac = points[j] - points[i], points[k] - points[i]
        if 0.5 * abs(ab[0] * ac[1] - ab[1] * ac[0]) < DEGENERACY_REL * bbox * bbox:
            return True
    return False


class Homography2D(ModelFamily):
    """x′ ~ H x, residual is the symmetric transfer distance"""
    name = 'homography'
    b = 4
    datum_dim = 4

    @staticmethod
    def matrix(theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).reshape(3, 3)

    def residuals(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        H = self.matrix(theta)
        with np.errstate(divide='ignore', invalid='ignore'):
            cond = np.linalg.cond(H) if np.all(np.isfinite(H)) else np.inf
        if not cond <= SINGULAR_COND:
            raise SingularModel("homography is not invertible")
        x, xp = _split(X)
        forward = np.sum((xp - apply_transform(H, x)) ** 2, axis=1)
        backward = np.sum((x - apply_transform(np.linalg.inv(H), xp)) ** 2, axis=1)
        return np.sqrt((forward + backward) / 2.0)

    def residual_matrix(self, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Singular hypotheses get an infinite column"""
        Hs = thetas.reshape(-1, 3, 3)
        out = np.full((X.shape[0], len(Hs)), np.inf)
        with np.errstate(divide='ignore', invalid='ignore'):
            conds = np.linalg.cond(Hs)
        ok = np.isfinite(conds) & (conds <= SINGULAR_COND)
        if not np.any(ok):
            return out
        Hs = Hs[ok]
        Hinv = np.linalg.inv(Hs)
        x, xp = _split(X)
        xh, xph = homogeneous(x), homogeneous(xp)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            fwd = np.einsum('nij,mj->mni', Hs, xh)
            fwd = fwd[..., :2] / fwd[..., 2:3]
            bwd = np.einsum('nij,mj->mni', Hinv, xph)
            bwd = bwd[..., :2] / bwd[..., 2:3]
            d = np.sqrt((np.sum((xp[:, None, :] - fwd) ** 2, axis=2)
                         + np.sum((x[:, None, :] - bwd) ** 2, axis=2)) / 2.0)
        d[~np.isfinite(d)] = np.inf
        out[:, ok] = d
        return out

    def fit_minimal(self, sample: np.ndarray) -> ModelParams:
        x, xp = _split(sample)
        if _collinear(x) or _collinear(xp):
            raise DegenerateSample("three collinear points in the sample")
        return self.params(self._dlt(x, xp, None, minimal=True))

    def fit_weighted(self, X: np.ndarray, weights: np.ndarray) -> ModelParams:
        keep = weights > 0
        x, xp = _split(X[keep])
        return self.params(self._dlt(x, xp, weights[keep], minimal=False))

    def _dlt(self, x, xp, w, minimal: bool) -> np.ndarray:
        T1, T2 = hartley_transform(x, w), hartley_transform(xp, w)
        a, b = apply_transform(T1, x), apply_transform(T2, xp)
        ones, zeros = np.ones(len(a)), np.zeros(len(a))
        rows_u = np.column_stack([
            zeros, zeros, zeros, -a[:, 0], -a[:, 1], -ones,
            b[:, 1] * a[:, 0], b[:, 1] * a[:, 1], b[:, 1]
        ])
        rows_v = np.column_stack([
            a[:, 0], a[:, 1], ones, zeros, zeros, zeros,
            -b[:, 0] * a[:, 0], -b[:, 0] * a[:, 1], -b[:, 0]
        ])
        if w is not None:
            sw = np.sqrt(w)[:, None]
            rows_u, rows_v = rows_u * sw, rows_v * sw
        h = _null_vector(np.vstack([rows_u, rows_v]), minimal, 9)
        H = np.linalg.inv(T2) @ h.reshape(3, 3) @ T1
        return canonical_matrix(H).ravel()


class Fundamental(ModelFamily):
    """x′ᵀ F x = 0, residual is the Sampson distance"""
    name = 'fundamental'
    b = 8
    datum_dim = 4

    @staticmethod
    def matrix(theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).reshape(3, 3)

    def residuals(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        return self.residual_matrix(np.asarray(theta, dtype=float)[None, :], X)[:, 0]

    def residual_matrix(self, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
        Fs = thetas.reshape(-1, 3, 3)
        x, xp = _split(X)
        xh, xph = homogeneous(x), homogeneous(xp)
        Fx = np.einsum('nij,mj->mni', Fs, xh)
        Ftxp = np.einsum('nji,mj->mni', Fs, xph)
        algebraic = np.einsum('mi,mni->mn', xph, Fx)
        denom = Fx[..., 0] ** 2 + Fx[..., 1] ** 2 + Ftxp[..., 0] ** 2 + Ftxp[..., 1] ** 2
        with np.errstate(divide='ignore', invalid='ignore'):
            d = np.abs(algebraic) / np.sqrt(denom)
        d[denom == 0] = np.where(algebraic[denom == 0] == 0, 0.0, np.inf)
        return d

    def fit_minimal(self, sample: np.ndarray) -> ModelParams:
        x, xp = _split(sample)
        return self.params(self._eight_point(x, xp, None, minimal=True))

    def fit_weighted(self, X: np.ndarray, weights: np.ndarray) -> ModelParams:
        keep = weights > 0
        x, xp = _split(X[keep])
        return self.params(self._eight_point(x, xp, weights[keep], minimal=False))

    def _eight_point(self, x, xp, w, minimal: bool) -> np.ndarray:
        T1, T2 = hartley_transform(x, w), hartley_transform(xp, w)
        a, b = apply_transform(T1, x), apply_transform(T2, xp)
        rows = np.column_stack([
            b[:, 0] * a[:, 0], b[:, 0] * a[:, 1], b[:, 0],
            b[:, 1] * a[:, 0], b[:, 1] * a[:, 1], b[:, 1],
            a[:, 0], a[:, 1], np.ones(len(a))
        ])
        if w is not None:
            rows = rows * np.sqrt(w)[:, None]
        f = _null_vector(rows, minimal, 9)
        F = T2.T @ rank_two(f.reshape(3, 3)) @ T1
        return canonical_matrix(rank_two(F)).ravel()


def rank_two(F: np.ndarray) -> np.ndarray:
    """Closest rank-2 matrix in Frobenius norm"""
    U, s, Vt = np.linalg.svd(F)
    s[2] = 0.0
    return U @ np.diag(s) @ Vt
