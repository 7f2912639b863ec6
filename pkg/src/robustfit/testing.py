"""
Statistical filtering of hypotheses and factors

The memberships of a real structure pile up near 1; their empirical CDF then
lags the uniform CDF, and the one-sided gap D⁻ = sup_x (x − F_t(x)) grows.
A model is kept when Pr(D ≥ D⁻) under the null is below α = 1/C(m, b).
"""
import logging
from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np
from scipy import special

from ..config import ALPHA_FLOOR
from ..errors import InvalidParams
from ..geometry import memberships as model_memberships
from ..models import ModelParams, PreferenceMatrix
from ..preference import deactivate_columns

logger = logging.getLogger('robustfit')

LOG_ALPHA_FLOOR = float(np.log(ALPHA_FLOOR))
P_METHODS = ('kolmogorov', 'smirnov')


def kuiper_d_minus(values: Any) -> float:
    """max_i max(s_i − (i−1)/m, 0) over the sorted sample"""
    s = np.sort(np.asarray(values, dtype=float).ravel())
    m = s.shape[0]
    if m == 0:
        raise InvalidParams("kuiper_d_minus of an empty sample")
    if s[0] < 0 or s[-1] > 1:
        raise InvalidParams("Membership values must lie in [0, 1]")
    gaps = s - np.arange(m) / m
    return float(min(max(gaps.max(), 0.0), 1.0))


def p_value(d_minus: float, m: int, method: str = 'kolmogorov') -> float:
    """
    Null tail probability of D⁻.

    'kolmogorov': Q(√m · D⁻) with Q(λ) = 2 Σ (−1)^(k−1) exp(−2k²λ²)
    'smirnov':    exact one-sided finite-m tail
    """
    if m < 1:
        raise InvalidParams(f"Sample size must be at least 1, got {m}")
    if method == 'kolmogorov':
        p = float(special.kolmogorov(np.sqrt(m) * d_minus))
    elif method == 'smirnov':
        p = float(special.smirnov(int(m), d_minus))
    else:
        raise InvalidParams(f"Unknown p-value method: {method}")
    return min(max(p, 0.0), 1.0)


def log_p_value(d_minus: float, m: int, method: str = 'kolmogorov') -> float:
    """log p without underflow: below ALPHA_FLOOR the leading tail term takes over"""
    p = p_value(d_minus, m, method)
    if p > ALPHA_FLOOR:
        return float(np.log(p))
    tail = -2.0 * m * d_minus * d_minus
    if method == 'kolmogorov':
        tail += float(np.log(2.0))
    # Capped so log p stays non-increasing in D⁻
    return min(tail, LOG_ALPHA_FLOOR)


def log_alpha(m: int, b: int, alpha_override: float = None) -> float:
    """log(1/C(m, b)) from log-gamma, floored at log(ALPHA_FLOOR)"""
    if alpha_override is not None:
        return float(np.log(alpha_override))
    if m < b:
        raise InvalidParams(f"Cannot choose {b} out of {m}")
    log_comb = special.gammaln(m + 1) - special.gammaln(b + 1) - special.gammaln(m - b + 1)
    return max(-float(log_comb), LOG_ALPHA_FLOOR)


def alpha(m: int, b: int, alpha_override: float = None) -> float:
    return float(np.exp(log_alpha(m, b, alpha_override)))


@dataclass(frozen=True)
class KuiperOutcome:
    """D⁻ and its tail probability for one membership vector"""
    d_minus: float
    p_value: float
    log_p_value: float
    sample_size: int  # Memberships entering the empirical CDF

    def passes(self, log_alpha_value: float) -> bool:
        return self.log_p_value < log_alpha_value


def evaluate_memberships(
    values: np.ndarray,
    cdf_support: str = 'positive',
    p_method: str = 'kolmogorov'
) -> KuiperOutcome:
    """'positive' takes the CDF over memberships > 0, 'all' over every datum"""
    values = np.asarray(values, dtype=float)
    if cdf_support == 'positive':
        values = values[values > 0]
    elif cdf_support != 'all':
        raise InvalidParams(f"Unknown cdf_support: {cdf_support}")
    if values.size == 0:
        return KuiperOutcome(d_minus=0.0, p_value=1.0, log_p_value=0.0, sample_size=0)
    d = kuiper_d_minus(values)
    m = int(values.size)
    return KuiperOutcome(
        d_minus=d,
        p_value=p_value(d, m, p_method),
        log_p_value=log_p_value(d, m, p_method),
        sample_size=m
    )


def test_statistic_for(
    model: ModelParams,
    data: Any,
    sigma: float,
    cdf_support: str = 'positive',
    p_method: str = 'kolmogorov'
) -> Tuple[float, float]:
    """(D⁻, p) of the memberships of every datum to model"""
    X = model.family.validate_data(data)
    outcome = evaluate_memberships(model_memberships(model, X, sigma), cdf_support, p_method)
    return outcome.d_minus, outcome.p_value


# Collected by pytest otherwise when imported into a test module
test_statistic_for.__test__ = False


def prefilter_columns(
    P: PreferenceMatrix,
    data: Any,
    sigma: float,
    cdf_support: str = 'positive',
    p_method: str = 'kolmogorov',
    alpha_override: float = None
) -> PreferenceMatrix:
    """
    Deactivate every column whose hypothesis does not pass the test.

    Column j already holds the memberships of all data to θ_j, so the test runs
    on the stored values.
    """
    if not P.hypotheses:
        return P
    family = P.hypotheses[0].params.family
    m = family.validate_data(data).shape[0]
    if m != P.shape[0]:
        raise InvalidParams(f"Data has {m} rows, preference matrix has {P.shape[0]}")
    if not sigma > 0:
        raise InvalidParams(f"sigma must be positive, got {sigma}")

    threshold = log_alpha(m, family.b, alpha_override)
    fails = np.zeros(P.shape[1], dtype=bool)
    for j in np.flatnonzero(P.active):
        outcome = evaluate_memberships(P.P[:, j], cdf_support, p_method)
        fails[j] = not outcome.passes(threshold)

    survivors = int(np.count_nonzero(P.active & ~fails))
    logger.info(f"Prefilter kept {survivors}/{P.n_active} columns (log α = {threshold:.2f})")
    return deactivate_columns(P, fails)
