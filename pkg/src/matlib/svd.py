"""
Rank-one SVD by power iteration
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..config import SVD_DEFAULTS
from ..errors import InvalidParams, NoConvergence, ZeroMatrix

logger = logging.getLogger('matlib')


@dataclass(frozen=True, eq=False)
class Svd1:
    """Dominant singular triple: A ≈ s x yᵀ with unit x, y"""
    x: np.ndarray
    s: float
    y: np.ndarray
    iterations: int = 0
    converged: bool = True


def _start_vector(A: np.ndarray, right: bool) -> np.ndarray:
    """Row sums of A (mapped to the right space if needed), with fallbacks for signed input"""
    x0 = A.sum(axis=1)
    if not np.any(x0):
        x0 = np.abs(A).sum(axis=1)
    if not right:
        return x0
    y0 = A.T @ x0
    if not np.any(y0):
        y0 = A[int(np.argmax(np.linalg.norm(A, axis=1)))].copy()
    return y0


def _canonical_sign(x: np.ndarray, y: np.ndarray):
    """Largest-magnitude entry of x positive; ties go to the lowest index"""
    if x[int(np.argmax(np.abs(x)))] < 0:
        return -x, -y
    return x, y


def rank_one_svd(
    A: np.ndarray,
    tol: float = SVD_DEFAULTS['tol'],
    max_iters: int = SVD_DEFAULTS['max_iters']
) -> Svd1:
    """
    Dominant singular triple of A by power iteration on the smaller Gram matrix.

    Converged when the Rayleigh quotient changes by less than tol (relative) and
    the iterated unit vector moves by less than 1e-3·√tol.
    """
    if not tol > 0:
        raise InvalidParams(f"tol must be positive, got {tol}")
    A = np.asarray(A, dtype=float)
    if not np.linalg.norm(A) > 0:
        raise ZeroMatrix("rank_one_svd of a zero matrix")

    m, n = A.shape
    right = n <= m
    G = A.T @ A if right else A @ A.T
    vec_tol = 1e-3 * np.sqrt(tol)

    w = _start_vector(A, right)
    w = w / np.linalg.norm(w)
    Gw = G @ w
    if not np.any(Gw):
        # Start landed in the null space; restart on the heaviest coordinate
        w = np.zeros_like(w)
        w[int(np.argmax(np.diag(G)))] = 1.0
        Gw = G @ w
    lam = float(w @ Gw)

    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        w_new = Gw / np.linalg.norm(Gw)
        Gw = G @ w_new
        lam_new = float(w_new @ Gw)
        rel = abs(lam_new - lam) / max(abs(lam_new), np.finfo(float).tiny)
        move = float(np.max(np.abs(w_new - w)))
        w, lam = w_new, lam_new
        converged = rel < tol
        if converged and move < vec_tol:
            break

    if right:
        y = w
        Ay = A @ y
        s = float(np.linalg.norm(Ay))
        x = Ay / s
    else:
        x = w
        Atx = A.T @ x
        s = float(np.linalg.norm(Atx))
        y = Atx / s
    x, y = _canonical_sign(x, y)
    result = Svd1(x=x, s=s, y=y, iterations=iters, converged=converged)

    if not converged:
        raise NoConvergence(
            f"Power iteration did not reach tol={tol} in {max_iters} iterations",
            result=result
        )
    logger.debug(f"rank_one_svd {m}x{n}: s={s:.6g} after {iters} iterations")
    return result
