"""
Robust multi-model fitting by iterated underapproximation of the preference matrix

sample_pool → build_preference → prefilter → loop {consensus init → NMU on the
active columns → refit → test → column deflation} → independent-set selection
→ exclusive assignment
"""
import logging
from typing import Any, Dict, List

import numpy as np

from ..config import LOAD_FLOOR_REL, POOL_SIZES, SUPPORT_FLOOR
from ..errors import (
    DegenerateSample, EmptyPreference, InsufficientSupport, InvalidParams, SingularModel
)
from ..events import event_bell
from ..geometry import ModelFamily, fit_weighted, memberships
from ..models import Bicluster, FitConfig, FitResult, ModelParams
from ..nmu import solve_rank_one
from ..preference import (
    build_preference, consensus_init, deactivate_columns, largest_column, sample_pool
)
from .selection import assign_exclusive, select_mis
from .testing import evaluate_memberships, log_alpha, prefilter_columns

logger = logging.getLogger('robustfit')
diagnostics_log = logging.getLogger('diagnostics')

DISCARD_REASONS = {
    InsufficientSupport: 'insufficient_support',
    SingularModel: 'singular_model',
    DegenerateSample: 'degenerate_refit'
}


def refit_from_factor(u_hat: Any, data: Any, family: ModelFamily) -> ModelParams:
    """Weighted least squares with the factor entries above SUPPORT_FLOOR as weights"""
    u_hat = np.asarray(u_hat, dtype=float).ravel()
    weights = np.where(u_hat > SUPPORT_FLOOR, u_hat, 0.0)
    support = int(np.count_nonzero(weights))
    if support < family.b:
        raise InsufficientSupport(f"Factor supports {support} data, {family.name} needs {family.b}")
    return fit_weighted(family, data, weights)


class FittingLoop:
    """
    Extracts one bicluster per iteration until the preference matrix runs out
    of active nonzero columns or the bicluster budget is spent.
    """
    def __init__(self, X: np.ndarray, family: ModelFamily, config: FitConfig):
        self.X = X
        self.family = family
        self.config = config
        self.log_alpha = log_alpha(X.shape[0], family.b, config.alpha_override)
        self.candidates: List[Bicluster] = []
        self.iterations: List[Dict[str, Any]] = []
        self.logger = logging.getLogger('robustfit')

    def run(self, P) -> List[Bicluster]:
        while len(self.iterations) < self.config.max_biclusters:
            try:
                j = largest_column(P)
            except EmptyPreference:
                self.logger.info(f"Preference matrix exhausted after {len(self.iterations)} biclusters")
                break
            P = self._step(P, j)
        else:
            self.logger.warning(f"Stopped at max_biclusters={self.config.max_biclusters}")
        return self.candidates

    def _step(self, P, j: int):
        active = np.flatnonzero(P.active)
        u0, v0 = consensus_init(P, j)
        factor = solve_rank_one(P.P[:, active], (u0, v0[active]), self.config.nmu)

        v_hat = np.zeros(P.shape[1])
        v_hat[active] = factor.v
        top = float(v_hat.max())
        loaded = v_hat > LOAD_FLOOR_REL * top if top > 0 else np.zeros(P.shape[1], dtype=bool)
        loaded[j] = True
        before = P.n_active
        P = deactivate_columns(P, loaded)

        self.iterations.append({
            'column': j,
            'iterations_used': factor.iterations_used,
            'converged': factor.converged,
            'deactivated_columns': before - P.n_active,
            'active_columns': P.n_active,
            'residual_norm': float(np.linalg.norm(P.P))
        })
        self._record(factor.u, v_hat, j, factor.is_zero)
        return P

    def _record(self, u_hat: np.ndarray, v_hat: np.ndarray, j: int, zero: bool):
        index = len(self.candidates)
        sigma = self.config.sigma
        try:
            if zero:
                raise InsufficientSupport("zero factor")
            theta = refit_from_factor(u_hat, self.X, self.family)
            sm = memberships(theta, self.X, sigma)
        except (InsufficientSupport, SingularModel, DegenerateSample) as e:
            reason = DISCARD_REASONS[type(e)]
            self.logger.debug(f"Bicluster {index} from column {j} discarded: {e}")
            self._discard(Bicluster(
                u_hat=u_hat, v_hat=v_hat, theta_hat=None, memberships=np.zeros(len(self.X)),
                discard_reason=reason, column=j
            ))
            return

        outcome = evaluate_memberships(sm, self.config.cdf_support, self.config.p_method)
        significant = outcome.passes(self.log_alpha)
        keep = significant or not self.config.post_test
        bicluster = Bicluster(
            u_hat=u_hat,
            v_hat=v_hat,
            theta_hat=theta,
            memberships=sm,
            d_minus=outcome.d_minus,
            p_value=outcome.p_value,
            log_p_value=outcome.log_p_value,
            keep=keep,
            discard_reason=None if keep else 'not_significant',
            column=j
        )
        diagnostics_log.info(
            f"bicluster={index} column={j} support={bicluster.support_size} "
            f"d_minus={outcome.d_minus:.4f} log10_p={outcome.log_p_value / np.log(10):.2f} keep={keep}"
        )
        if keep:
            self.candidates.append(bicluster)
            event_bell.publish('bicluster_extracted', {
                'index': index,
                'column': j,
                'support_size': bicluster.support_size,
                'p_value': outcome.p_value
            })
        else:
            self._discard(bicluster)

    def _discard(self, bicluster: Bicluster):
        self.candidates.append(bicluster)
        event_bell.publish('candidate_discarded', {
            'index': len(self.candidates) - 1,
            'column': bicluster.column,
            'reason': bicluster.discard_reason
        })


def fit_models(data: Any, family: ModelFamily, config: FitConfig) -> FitResult:
    """Run the whole pipeline; deterministic for a given config.seed"""
    X = family.validate_data(data)
    m = X.shape[0]
    if m < family.b:
        raise InvalidParams(f"{family.name} needs at least {family.b} data, got {m}")

    n = config.pool_size or POOL_SIZES[family.name]
    pool = sample_pool(X, family, n, config.seed)
    P = build_preference(X, pool, config.sigma)
    if config.prefilter:
        P = prefilter_columns(
            P, X, config.sigma, config.cdf_support, config.p_method, config.alpha_override
        )
    survivors = P.n_active

    loop = FittingLoop(X, family, config)
    candidates = loop.run(P)
    kept = [c for c in candidates if c.keep]
    selected = select_mis(kept, config.corr_threshold) if kept else []

    assignment = None
    if config.exclusive_assignment:
        assignment = assign_exclusive(selected, X) if selected else [0] * m

    logger.info(
        f"{family.name}: {len(candidates)} biclusters, {len(kept)} kept, {len(selected)} selected "
        f"(σ={config.sigma}, pool {n}, {survivors} columns after prefilter)"
    )
    event_bell.publish('models_selected', {
        'family': family.name,
        'count': len(selected),
        'candidates': len(candidates)
    })

    diagnostics = {
        'n_data': m,
        'pool_size': n,
        'active_after_prefilter': survivors,
        'log10_alpha': loop.log_alpha / np.log(10.0),
        'iterations': loop.iterations,
        'residual_norms': [it['residual_norm'] for it in loop.iterations],
        'discarded_columns': [it['deactivated_columns'] for it in loop.iterations],
        'discard_reasons': {
            reason: sum(1 for c in candidates if c.discard_reason == reason)
            for reason in sorted({c.discard_reason for c in candidates if c.discard_reason})
        }
    }
    return FitResult(
        selected=selected,
        all_candidates=candidates,
        assignment=assignment,
        diagnostics=diagnostics,
        preference=P
    )
