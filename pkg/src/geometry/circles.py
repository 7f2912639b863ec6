"""
2D circles: θ = (cx, cy, ρ)
Weighted fit seeds a Levenberg-Marquardt refinement of the geometric
residual with the algebraic x² + y² = 2cx·x + 2cy·y + k solution.
"""
import logging

import numpy as np
from scipy import optimize

from ..config import CIRCLE_REFINE, DEGENERACY_REL
from ..errors import DegenerateSample
from ..models import ModelParams
from .base import ModelFamily, sample_scale

logger = logging.getLogger('geometry')


class Circle2D(ModelFamily):
    name = 'circle2d'
    b = 3
    datum_dim = 2

    def residuals(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        return np.abs(np.hypot(X[:, 0] - theta[0], X[:, 1] - theta[1]) - theta[2])

    def residual_matrix(self, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
        dx = X[:, 0, None] - thetas[:, 0]
        dy = X[:, 1, None] - thetas[:, 1]
        return np.abs(np.hypot(dx, dy) - thetas[:, 2])

    def fit_minimal(self, sample: np.ndarray) -> ModelParams:
        a, b, c = sample
        scale = sample_scale(sample)
        gaps = [np.linalg.norm(b - a), np.linalg.norm(c - a), np.linalg.norm(c - b)]
        if min(gaps) < DEGENERACY_REL * scale:
            raise DegenerateSample("coincident points")

        bbox = float(np.max(np.ptp(sample, axis=0)))
        ab, ac = b - a, c - a
        area = 0.5 * abs(ab[0] * ac[1] - ab[1] * ac[0])
        if area < DEGENERACY_REL * bbox * bbox:
            raise DegenerateSample("collinear points")

        # Perpendicular bisectors, solved relative to a
        lhs = 2.0 * np.array([ab, ac])
        rhs = np.array([ab @ ab, ac @ ac])
        offset = np.linalg.solve(lhs, rhs)
        return self.params([a[0] + offset[0], a[1] + offset[1], float(np.linalg.norm(offset))])

    def fit_weighted(self, X: np.ndarray, weights: np.ndarray) -> ModelParams:
        w = weights
        keep = w > 0
        X, w = X[keep], w[keep]
        origin = w @ X / w.sum()
        Y = X - origin
        sw = np.sqrt(w)

        # Algebraic seed
        design = np.column_stack([Y, np.ones(len(Y))]) * sw[:, None]
        target = np.sum(Y * Y, axis=1) * sw
        (a, b, k), *_ = np.linalg.lstsq(design, target, rcond=None)
        center = np.array([a / 2.0, b / 2.0])
        rho_sq = k + center @ center
        if rho_sq > 0:
            rho = float(np.sqrt(rho_sq))
        else:
            rho = float(w @ np.linalg.norm(Y - center, axis=1) / w.sum())

        tiny = np.finfo(float).tiny

        def weighted_residuals(p):
            return sw * (np.hypot(Y[:, 0] - p[0], Y[:, 1] - p[1]) - p[2])

        def jacobian(p):
            diff = Y - p[:2]
            dist = np.maximum(np.hypot(diff[:, 0], diff[:, 1]), tiny)
            return np.column_stack([-diff / dist[:, None], -np.ones(len(Y))]) * sw[:, None]

        # Geometric refinement
        refined = optimize.least_squares(
            weighted_residuals,
            np.array([center[0], center[1], rho]),
            jac=jacobian,
            method='lm',
            xtol=CIRCLE_REFINE['xtol'],
            ftol=CIRCLE_REFINE['ftol'],
            gtol=CIRCLE_REFINE['ftol'],
            max_nfev=CIRCLE_REFINE['max_nfev']
        )
        if not refined.success:
            logger.debug(f"Circle refinement stopped after {refined.nfev} evaluations: {refined.message}")
        params = refined.x

        return self.params([params[0] + origin[0], params[1] + origin[1], abs(params[2])])
