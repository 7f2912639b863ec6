"""
Redundancy resolution among extracted factors

Factors whose left vectors are too correlated conflict; every maximal set of
mutually compatible factors is a candidate solution and the one with the
smallest geometric mean of p-values wins.
"""
import logging
from typing import Any, List, Sequence, Set, Tuple

import numpy as np

from ..errors import InvalidParams
from ..models import Bicluster

logger = logging.getLogger('robustfit')


def factor_correlation(u_a: Any, u_b: Any) -> float:
    """Cosine similarity of two factors"""
    u_a = np.asarray(u_a, dtype=float).ravel()
    u_b = np.asarray(u_b, dtype=float).ravel()
    na, nb = np.linalg.norm(u_a), np.linalg.norm(u_b)
    if not (na > 0 and nb > 0):
        raise InvalidParams("factor_correlation of a zero vector")
    return float(np.clip(u_a @ u_b / (na * nb), -1.0, 1.0))


def correlation_matrix(vectors: Sequence[np.ndarray]) -> np.ndarray:
    U = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    norms = np.linalg.norm(U, axis=0)
    if np.any(norms <= 0):
        raise InvalidParams("correlation_matrix of a zero vector")
    U = U / norms
    return np.clip(U.T @ U, -1.0, 1.0)


def conflict_graph(candidates: Sequence[Bicluster], corr_threshold: float) -> np.ndarray:
    """Boolean adjacency: edge iff correlation > corr_threshold"""
    conflicts = correlation_matrix([c.u_hat for c in candidates]) > corr_threshold
    np.fill_diagonal(conflicts, False)
    return conflicts


def _bron_kerbosch(R: Set[int], P: Set[int], X: Set[int], neighbors: List[Set[int]], cliques: List[Set[int]]):
    if not P and not X:
        cliques.append(R)
        return
    pivot = min(P | X, key=lambda w: -len(P & neighbors[w]))
    for v in sorted(P - neighbors[pivot]):
        _bron_kerbosch(R | {v}, P & neighbors[v], X & neighbors[v], neighbors, cliques)
        P = P - {v}
        X = X | {v}


def maximal_independent_sets(conflicts: np.ndarray) -> List[Tuple[int, ...]]:
    """All maximal independent sets, as maximal cliques of the complement graph"""
    conflicts = np.asarray(conflicts, dtype=bool)
    n = conflicts.shape[0]
    if n == 0:
        return []
    compatible = ~(conflicts | conflicts.T)
    np.fill_diagonal(compatible, False)
    neighbors = [set(int(w) for w in np.flatnonzero(compatible[v])) for v in range(n)]
    cliques: List[Set[int]] = []
    _bron_kerbosch(set(), set(range(n)), set(), neighbors, cliques)
    return sorted(tuple(sorted(c)) for c in cliques)


def mis_score(candidates: Sequence[Bicluster], members: Tuple[int, ...]) -> Tuple:
    """Sort key: log geometric mean of p-values, then more members, lower energy, indices"""
    log_mean = float(np.mean([candidates[t].log_p_value for t in members]))
    energy = float(sum(candidates[t].residual_energy for t in members))
    return (log_mean, -len(members), energy, members)


def select_mis(candidates: Sequence[Bicluster], corr_threshold: float) -> List[Bicluster]:
    """The maximal independent set with minimum geometric mean of p-values"""
    if not candidates:
        raise InvalidParams("select_mis needs at least one candidate")
    if not 0 < corr_threshold < 1:
        raise InvalidParams(f"corr_threshold must be in (0, 1), got {corr_threshold}")

    sets = maximal_independent_sets(conflict_graph(candidates, corr_threshold))
    best = min(sets, key=lambda members: mis_score(candidates, members))
    logger.info(
        f"{len(sets)} maximal independent set(s) over {len(candidates)} candidates, "
        f"selected {len(best)}"
    )
    return [candidates[t] for t in best]


def assign_exclusive(selected: Sequence[Bicluster], data: Any) -> List[int]:
    """
    Label of each datum: 1 + index of the closest model among those with
    positive membership, 0 when no model claims it.
    """
    if not selected:
        raise InvalidParams("assign_exclusive needs at least one model")
    family = selected[0].theta_hat.family
    X = family.validate_data(data)
    distances = np.column_stack([
        b.theta_hat.family.residuals(b.theta_hat.theta, X) for b in selected
    ])
    claims = np.column_stack([b.memberships > 0 for b in selected])
    distances = np.where(claims, distances, np.inf)
    labels = np.argmin(distances, axis=1) + 1
    labels[~claims.any(axis=1)] = 0
    return [int(label) for label in labels]
