"""
Rank-one nonnegative matrix underapproximation by ADMM

Solves  min ρ/2‖R‖F²  s.t.  R = A − u vᵀ,  u, v, R ≥ 0
through closed-form block updates of the augmented Lagrangian. With ρ = 0
(the default) the problem is the pure underapproximation constraint and the
iterates settle on a feasible factor near the initial one; ρ = 1 adds the
residual norm to the R block.
"""
import logging
from typing import Tuple

import numpy as np

from ..config import CLAMP_EPS, DIV_GUARD, NMU_DEFAULTS, REL_EPS, U_FLOOR
from ..errors import DegenerateFactor, NoConvergence, ZeroMatrix
from ..matlib import inf_norm, project_nonneg, rank_one_svd
from ..models import NmuConfig, NmuFactor, NmuState

logger = logging.getLogger('nmu')


def rescale_factors(u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Move the scale of u into v so that max(u) = 1; u vᵀ is unchanged"""
    top = float(np.max(u)) if u.size else 0.0
    if top > 0:
        return u / top, v * top
    return u, v


def augmented_lagrangian(
    A: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    R: np.ndarray,
    Gamma: np.ndarray,
    gamma: float,
    residual_weight: float = NMU_DEFAULTS['residual_weight']
) -> float:
    """ℒ(u, v, R, Γ) = ρ/2‖R‖² + Γ•(A − uvᵀ − R) + γ/2‖A − uvᵀ − R‖²"""
    gap = A - np.outer(u, v) - R
    return float(
        0.5 * residual_weight * np.sum(R * R) + np.sum(Gamma * gap) + 0.5 * gamma * np.sum(gap * gap)
    )


def admm_step(A: np.ndarray, state: NmuState, cfg: NmuConfig) -> NmuState:
    """One sweep of the u, v, R block minimizations followed by the multiplier update"""
    gamma, xi = cfg.gamma, cfg.xi
    M = A - state.R + state.Gamma / gamma

    v = state.v
    vtv = float(v @ v)
    if vtv < DIV_GUARD:
        raise DegenerateFactor(f"v collapsed at iteration {state.iter + 1} (vᵀv={vtv:.3g})")
    u = project_nonneg(M @ v / vtv)
    u, v = rescale_factors(u, v)

    utu = float(u @ u)
    if utu < DIV_GUARD:
        raise DegenerateFactor(f"u collapsed at iteration {state.iter + 1} (uᵀu={utu:.3g})")
    v = project_nonneg(u @ M / utu)

    gap = A - np.outer(u, v)
    R = project_nonneg((gamma * gap + state.Gamma) / (cfg.residual_weight + gamma))
    Gamma = state.Gamma + xi * gamma * (gap - R)
    return NmuState(u=u, v=v, R=R, Gamma=Gamma, iter=state.iter + 1)


def init_svd(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """u0 = x/‖x‖∞, v0 = ‖x‖∞ s y from the rank-one SVD of A"""
    try:
        svd = rank_one_svd(A)
    except NoConvergence as e:
        logger.warning(f"SVD initialization did not converge, using last iterate: {e}")
        svd = e.result
    scale = inf_norm(svd.x)
    u0 = svd.x / scale
    v0 = scale * svd.s * svd.y
    u0[np.abs(u0) < CLAMP_EPS] = 0.0
    v0[np.abs(v0) < CLAMP_EPS] = 0.0
    return project_nonneg(u0), project_nonneg(v0)


def polish_feasibility(
    A: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    u_floor: float = U_FLOOR
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Shrink the factors until A − u vᵀ ≥ 0 holds in floating point.

    v_j is capped by A_ij/u_i over rows with u_i > u_floor; the remaining small
    u_i are capped by A_ij/v_j over loaded columns; v finally loses 4 ulps so
    that rounded products never exceed A.
    """
    u = u.copy()
    v = v.copy()
    big = u > u_floor
    if np.any(big):
        caps = (A[big] / u[big][:, None]).min(axis=0)
        v = np.minimum(v, caps)

    small = (u > 0) & ~big
    loaded = v > 0
    if np.any(small) and np.any(loaded):
        caps = (A[np.ix_(small, loaded)] / v[loaded]).min(axis=1)
        u[small] = np.minimum(u[small], caps)

    v *= 1.0 - 4.0 * np.finfo(float).eps
    return project_nonneg(u), project_nonneg(v)


def solve_rank_one(
    A: np.ndarray,
    init: Tuple[np.ndarray, np.ndarray],
    cfg: NmuConfig = NmuConfig()
) -> NmuFactor:
    """
    Iterate admm_step from (u0, v0, R = P₊(A − u0 v0ᵀ), Γ = 0) until the relative
    change of both u and v is below cfg.tau, then polish for exact feasibility.
    """
    A = np.asarray(A, dtype=float)
    norm_a = float(np.linalg.norm(A))
    if not norm_a > 0:
        raise ZeroMatrix("solve_rank_one of a zero matrix")

    u0, v0 = rescale_factors(np.asarray(init[0], dtype=float), np.asarray(init[1], dtype=float))
    state = NmuState(
        u=u0,
        v=v0,
        R=project_nonneg(A - np.outer(u0, v0)),
        Gamma=np.zeros_like(A)
    )

    history = []
    converged = False
    for _ in range(cfg.max_iters):
        try:
            new = admm_step(A, state, cfg)
        except DegenerateFactor as e:
            logger.warning(f"Zero factor: {e}")
            return NmuFactor(
                u=np.zeros_like(u0),
                v=np.zeros_like(v0),
                iterations_used=state.iter,
                history=history,
                converged=False,
                matrix_norm=norm_a
            )
        du = np.linalg.norm(new.u - state.u) / max(np.linalg.norm(state.u), REL_EPS)
        dv = np.linalg.norm(new.v - state.v) / max(np.linalg.norm(state.v), REL_EPS)
        state = new
        if cfg.record_history:
            history.append(float(np.linalg.norm(state.R)) / norm_a)
        if du < cfg.tau and dv < cfg.tau:
            converged = True
            break

    u, v = state.u, state.v
    if cfg.polish:
        u, v = polish_feasibility(A, u, v)

    logger.debug(
        f"NMU {A.shape[0]}x{A.shape[1]}: {state.iter} iterations, "
        f"converged={converged}, support {np.count_nonzero(u)}x{np.count_nonzero(v)}"
    )
    return NmuFactor(
        u=u,
        v=v,
        iterations_used=state.iter,
        history=history,
        converged=converged,
        matrix_norm=norm_a
    )
