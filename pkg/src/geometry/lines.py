"""
2D lines: θ = (cos α, sin α, c), line {x : n·x + c = 0}
"""
import numpy as np

from ..config import DEGENERACY_REL
from ..errors import DegenerateSample
from ..models import ModelParams
from .base import ModelFamily, sample_scale


def _canonical(n: np.ndarray, c: float) -> np.ndarray:
    """Unit normal with its largest-magnitude component positive"""
    norm = np.linalg.norm(n)
    n, c = n / norm, c / norm
    if n[int(np.argmax(np.abs(n)))] < 0:
        n, c = -n, -c
    return np.array([n[0], n[1], c])


class Line2D(ModelFamily):
    name = 'line2d'
    b = 2
    datum_dim = 2

    def residuals(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        return np.abs(X @ theta[:2] + theta[2])

    def residual_matrix(self, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
        return np.abs(X @ thetas[:, :2].T + thetas[:, 2])

    def fit_minimal(self, sample: np.ndarray) -> ModelParams:
        p, q = sample
        d = q - p
        length = float(np.linalg.norm(d))
        if length < DEGENERACY_REL * sample_scale(sample):
            raise DegenerateSample("coincident points")
        n = np.array([-d[1], d[0]]) / length
        return self.params(_canonical(n, -float(n @ p)))

    def fit_weighted(self, X: np.ndarray, weights: np.ndarray) -> ModelParams:
        """Weighted total least squares: normal = least-variance direction of the weighted scatter"""
        w = weights
        mean = w @ X / w.sum()
        Y = X - mean
        scatter = (Y * w[:, None]).T @ Y
        _, vecs = np.linalg.eigh(scatter)
        n = vecs[:, 0]
        return self.params(_canonical(n, -float(n @ mean)))
