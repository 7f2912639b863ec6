"""
Core models for underfit
Value types shared by the factorization and robust fitting components
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, TYPE_CHECKING

import numpy as np

from .config import NMU_DEFAULTS, NMU_ON_PREFERENCE, FIT_DEFAULTS
from .errors import InvalidParams

if TYPE_CHECKING:
    from .geometry.base import ModelFamily


@dataclass(frozen=True)
class NmuConfig:
    """ADMM parameters for one rank-one NMU solve"""
    gamma: float = NMU_DEFAULTS['gamma']
    xi: float = NMU_DEFAULTS['xi']
    residual_weight: float = NMU_DEFAULTS['residual_weight']
    tau: float = NMU_DEFAULTS['tau']
    max_iters: int = NMU_DEFAULTS['max_iters']
    record_history: bool = NMU_DEFAULTS['record_history']
    polish: bool = NMU_DEFAULTS['polish']

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidParams(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.xi <= 2:
            raise InvalidParams(f"xi must be in (0, 2], got {self.xi}")
        if not self.residual_weight >= 0:
            raise InvalidParams(f"residual_weight must be nonnegative, got {self.residual_weight}")
        if not self.tau > 0:
            raise InvalidParams(f"tau must be positive, got {self.tau}")
        if self.max_iters < 1:
            raise InvalidParams(f"max_iters must be at least 1, got {self.max_iters}")

    @classmethod
    def for_preference(cls) -> 'NmuConfig':
        """Looser settings used on preference matrices"""
        return cls(
            tau=NMU_ON_PREFERENCE['tau'],
            max_iters=NMU_ON_PREFERENCE['max_iters'],
            record_history=False
        )


@dataclass
class NmuState:
    """ADMM iterate: factors, residual, multiplier"""
    u: np.ndarray
    v: np.ndarray
    R: np.ndarray
    Gamma: np.ndarray
    iter: int = 0


@dataclass
class NmuFactor:
    """One rank-one underapproximation pair and how it was obtained"""
    u: np.ndarray
    v: np.ndarray
    iterations_used: int
    history: List[float] = field(default_factory=list)  # ‖R‖F / ‖A‖F per iteration
    converged: bool = False
    matrix_norm: float = 0.0  # ‖A‖F of the matrix this factor was extracted from

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.u > 0) and np.any(self.v > 0))

    def outer(self) -> np.ndarray:
        return np.outer(self.u, self.v)

    def history_against(self, norm: float) -> List[float]:
        """Residual curve relative to another matrix norm (e.g. the undeflated A)"""
        if norm <= 0:
            return list(self.history)
        scale = self.matrix_norm / norm
        return [h * scale for h in self.history]

    def to_dict(self) -> dict:
        return {
            'iterations_used': self.iterations_used,
            'converged': self.converged,
            'relative_residual_history': list(self.history)
        }


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Parameter vector θ of one model instance"""
    family: 'ModelFamily'
    theta: np.ndarray

    def to_dict(self) -> dict:
        return {
            'family': self.family.name,
            'theta': [float(t) for t in self.theta]
        }


@dataclass(frozen=True, eq=False)
class Hypothesis:
    """Model estimated from one minimal sample"""
    params: ModelParams
    sample_indices: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PreferenceMatrix:
    """Soft memberships of data (rows) to hypotheses (columns)"""
    P: np.ndarray
    hypotheses: List[Hypothesis]
    sigma: float
    active: np.ndarray  # Boolean mask over columns

    @property
    def shape(self) -> Tuple[int, int]:
        return self.P.shape

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active))


@dataclass(frozen=True)
class FitConfig:
    """Robust multi-model fitting parameters"""
    sigma: float
    corr_threshold: float = FIT_DEFAULTS['corr_threshold']
    max_biclusters: int = FIT_DEFAULTS['max_biclusters']
    alpha_override: Optional[float] = FIT_DEFAULTS['alpha_override']
    exclusive_assignment: bool = FIT_DEFAULTS['exclusive_assignment']
    prefilter: bool = FIT_DEFAULTS['prefilter']
    post_test: bool = FIT_DEFAULTS['post_test']
    cdf_support: str = FIT_DEFAULTS['cdf_support']
    p_method: str = FIT_DEFAULTS['p_method']
    seed: int = FIT_DEFAULTS['seed']
    pool_size: Optional[int] = None  # None: per-family default
    nmu: NmuConfig = field(default_factory=NmuConfig.for_preference)

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParams(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.corr_threshold < 1:
            raise InvalidParams(f"corr_threshold must be in (0, 1), got {self.corr_threshold}")
        if self.max_biclusters < 1:
            raise InvalidParams(f"max_biclusters must be at least 1, got {self.max_biclusters}")
        if self.alpha_override is not None and not 0 < self.alpha_override < 1:
            raise InvalidParams(f"alpha_override must be in (0, 1), got {self.alpha_override}")
        if self.cdf_support not in ('positive', 'all'):
            raise InvalidParams(f"Unknown cdf_support: {self.cdf_support}")
        if self.p_method not in ('kolmogorov', 'smirnov'):
            raise InvalidParams(f"Unknown p_method: {self.p_method}")
        if self.pool_size is not None and self.pool_size < 1:
            raise InvalidParams(f"pool_size must be at least 1, got {self.pool_size}")
        if self.seed < 0:
            raise InvalidParams(f"seed must be nonnegative, got {self.seed}")


@dataclass(eq=False)
class Bicluster:
    """One NMU factor of the preference matrix with its refitted model and test"""
    u_hat: np.ndarray
    v_hat: np.ndarray
    theta_hat: Optional[ModelParams]
    memberships: np.ndarray
    d_minus: float = 0.0
    p_value: float = 1.0
    log_p_value: float = 0.0
    keep: bool = False
    discard_reason: Optional[str] = None
    column: int = -1  # j* the factor was initialized from

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.memberships > 0))

    @property
    def residual_energy(self) -> float:
        """Σ (1 - sm)² over the support, the tie-breaker among equally good selections"""
        support = self.memberships > 0
        return float(np.sum((1.0 - self.memberships[support]) ** 2))

    def to_dict(self) -> dict:
        return {
            'family': self.theta_hat.family.name if self.theta_hat is not None else None,
            'theta': self.theta_hat.to_dict()['theta'] if self.theta_hat is not None else None,
            'p_value': self.p_value,
            'log10_p_value': self.log_p_value / np.log(10.0),
            'd_minus': self.d_minus,
            'support_size': self.support_size,
            'column': self.column,
            'discard_reason': self.discard_reason
        }


@dataclass(eq=False)
class FitResult:
    """Outcome of the robust fitting pipeline"""
    selected: List[Bicluster]
    all_candidates: List[Bicluster]
    assignment: Optional[List[int]]
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    preference: Optional[PreferenceMatrix] = None  # P as built (after the prefilter), for reports

    @property
    def memberships(self) -> np.ndarray:
        """m × T matrix of soft memberships to the selected models"""
        if not self.selected:
            size = len(self.all_candidates[0].memberships) if self.all_candidates else 0
            return np.zeros((size, 0))
        return np.column_stack([b.memberships for b in self.selected])

    def to_dict(self) -> dict:
        return {
            'models': [b.to_dict() for b in self.selected],
            'assignment': list(self.assignment) if self.assignment is not None else None,
            'candidates': [b.to_dict() for b in self.all_candidates],
            'diagnostics': self.diagnostics
        }
