"""
Parametric model families
A model is the zero level-set of f(x; θ); each family knows its residual,
its minimal-sample fit and its weighted least-squares refit.
"""
from abc import ABC, abstractmethod
from typing import Any, Union

import numpy as np

from ..errors import InsufficientSupport, InvalidParams
from ..models import ModelParams


class ModelFamily(ABC):
    """Abstract model family: name, minimal sample size b, datum dimension"""
    name: str = ''
    b: int = 1
    datum_dim: int = 2

    def params(self, theta: Any) -> ModelParams:
        return ModelParams(family=self, theta=np.asarray(theta, dtype=float))

    def validate_data(self, X: Any) -> np.ndarray:
        """Finite m × datum_dim array"""
        X = np.array(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.datum_dim:
            raise InvalidParams(
                f"{self.name} data must have {self.datum_dim} coordinates per datum, "
                f"got shape {X.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise InvalidParams(f"{self.name} data has non-finite coordinates")
        return X

    def support_weights(self, weights: Any, m: int) -> np.ndarray:
        """Validated weights in [0, 1] with at least b positive entries"""
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape[0] != m:
            raise InvalidParams(f"Expected {m} weights, got {w.shape[0]}")
        w = np.clip(w, 0.0, 1.0)
        positive = int(np.count_nonzero(w > 0))
        if positive < self.b:
            raise InsufficientSupport(
                f"{self.name} needs {self.b} positive weights, got {positive}"
            )
        return w

    @abstractmethod
    def residuals(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Point-to-model distance for every row of X"""

    def residual_matrix(self, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
        """m × n distances of every datum to every parameter vector (rows of thetas)"""
        return np.column_stack([self.residuals(theta, X) for theta in thetas])

    @abstractmethod
    def fit_minimal(self, sample: np.ndarray) -> ModelParams:
        """Model through exactly b data; raises DegenerateSample"""

    @abstractmethod
    def fit_weighted(self, X: np.ndarray, weights: np.ndarray) -> ModelParams:
        """argmin_θ Σ w_i e(x_i, θ)²; raises InsufficientSupport"""

    def __repr__(self):
        return f"{type(self).__name__}(b={self.b})"


def sample_scale(X: np.ndarray) -> float:
    """Coordinate magnitude used to make degeneracy thresholds unit-free"""
    return max(float(np.max(np.abs(X))), 1.0) if X.size else 1.0


def residual(params: ModelParams, datum: Any) -> float:
    """e(x, θ) for a single datum"""
    X = params.family.validate_data(datum)
    return float(params.family.residuals(params.theta, X)[0])


def soft_membership(d: Any, sigma: float) -> Union[float, np.ndarray]:
    """exp(−d²/(2σ²)) for d ≤ 3σ, exactly 0 beyond"""
    if not sigma > 0:
        raise InvalidParams(f"sigma must be positive, got {sigma}")
    d = np.asarray(d, dtype=float)
    inside = np.isfinite(d) & (d <= 3.0 * sigma)
    with np.errstate(over='ignore', invalid='ignore'):
        values = np.where(inside, np.exp(-np.square(d) / (2.0 * sigma * sigma)), 0.0)
    return float(values) if values.ndim == 0 else values


def memberships(params: ModelParams, X: np.ndarray, sigma: float) -> np.ndarray:
    """Soft membership of every datum to one model"""
    return soft_membership(params.family.residuals(params.theta, X), sigma)


def fit_minimal(family: ModelFamily, sample: Any) -> ModelParams:
    sample = family.validate_data(sample)
    if sample.shape[0] != family.b:
        raise InvalidParams(f"{family.name} minimal fit needs {family.b} data, got {sample.shape[0]}")
    return family.fit_minimal(sample)


def fit_weighted(family: ModelFamily, data: Any, weights: Any) -> ModelParams:
    X = family.validate_data(data)
    return family.fit_weighted(X, family.support_weights(weights, X.shape[0]))


def weighted_objective(params: ModelParams, X: np.ndarray, weights: np.ndarray) -> float:
    """Σ w_i e(x_i, θ)²"""
    r = params.family.residuals(params.theta, X)
    return float(np.sum(np.asarray(weights) * r * r))
