"""
Multi-factor NMU by residual deflation, energy accounting and factor output
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..config import DEFLATION_STOP_REL
from ..errors import InvalidParams, NoConvergence, ZeroMatrix
from ..events import event_bell
from ..matlib import (
    as_matrix, frobenius_norm, project_nonneg, rank_one_svd,
    require_nonnegative, write_matrix_csv
)
from ..models import NmuConfig, NmuFactor
from .admm import init_svd, solve_rank_one

logger = logging.getLogger('nmu')


def extract_factors(A: np.ndarray, r: int, cfg: NmuConfig = NmuConfig()) -> List[NmuFactor]:
    """
    Extract up to r underapproximation factors, deflating A ← P₊(A − û v̂ᵀ) after each.

    Stops early once the residual is negligible or a factor collapses to zero,
    so fewer than r factors may come back.
    """
    if r < 1:
        raise InvalidParams(f"r must be at least 1, got {r}")
    A = as_matrix(A)
    require_nonnegative(A)
    norm_0 = frobenius_norm(A)
    if not norm_0 > 0:
        raise ZeroMatrix("extract_factors of a zero matrix")

    current = A
    factors: List[NmuFactor] = []
    for t in range(r):
        remaining = frobenius_norm(current)
        if remaining < DEFLATION_STOP_REL * norm_0:
            logger.info(f"Residual exhausted after {t} factor(s)")
            break

        factor = solve_rank_one(current, init_svd(current), cfg)
        if factor.is_zero:
            logger.warning(f"Factor {t + 1} collapsed to zero, stopping")
            break

        factors.append(factor)
        current = project_nonneg(current - factor.outer())
        logger.info(
            f"Factor {t + 1}/{r}: {factor.iterations_used} iterations, "
            f"residual {frobenius_norm(current) / norm_0:.3e} of ‖A‖F"
        )
        event_bell.publish('factor_extracted', {
            'index': t,
            'iterations_used': factor.iterations_used,
            'converged': factor.converged,
            'relative_residual': frobenius_norm(current) / norm_0
        })

    return factors


def deflate(A: np.ndarray, factors: List[NmuFactor]) -> np.ndarray:
    """Residual after subtracting the factors in order, clamped at every step"""
    current = np.asarray(A, dtype=float)
    for factor in factors:
        current = project_nonneg(current - factor.outer())
    return current


def factor_energy(A: np.ndarray, factors: List[NmuFactor]) -> Dict[str, Any]:
    """Share of ‖A‖F² carried by each factor and by the final residual"""
    total = frobenius_norm(A) ** 2
    if not total > 0:
        raise ZeroMatrix("factor_energy of a zero matrix")
    return {
        'factors': [float(np.sum(f.outer() ** 2) / total) for f in factors],
        'residual': float(np.sum(deflate(A, factors) ** 2) / total)
    }


def svd_deflation(A: np.ndarray, r: int) -> List[Dict[str, Any]]:
    """
    Baseline: rank-one SVD deflation with clamping.

    Reports, per step, how many entries of A − s x yᵀ were negative before the
    clamp; underapproximation never produces any.
    """
    current = as_matrix(A)
    steps = []
    for t in range(r):
        if not frobenius_norm(current) > 0:
            break
        try:
            svd = rank_one_svd(current)
        except NoConvergence as e:
            svd = e.result
        residual = current - svd.s * np.outer(svd.x, svd.y)
        steps.append({
            'index': t,
            's': svd.s,
            'negative_entries': int(np.count_nonzero(residual < 0)),
            'min_residual': float(residual.min()),
            'residual': residual
        })
        current = project_nonneg(residual)
    return steps


def write_factors(
    out_dir: Union[str, Path],
    factors: List[NmuFactor],
    extra: Optional[Dict[str, Any]] = None
) -> Dict[str, Path]:
    """u columns, v columns and a JSON sidecar with the convergence records"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        'u': out_dir / 'factors_u.csv',
        'v': out_dir / 'factors_v.csv',
        'meta': out_dir / 'factors.json'
    }
    if factors:
        write_matrix_csv(paths['u'], np.column_stack([f.u for f in factors]))
        write_matrix_csv(paths['v'], np.column_stack([f.v for f in factors]))
    else:
        paths['u'].write_text('')
        paths['v'].write_text('')

    meta = {'factors': [f.to_dict() for f in factors]}
    if extra:
        meta.update(extra)
    with open(paths['meta'], 'w') as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    return paths
