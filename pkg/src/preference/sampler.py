"""
Uniform random sampling of model hypotheses
"""
import logging
from typing import Any, List

import numpy as np

from ..config import REDRAW_FACTOR
from ..errors import DegenerateSample, InvalidParams, PoolExhausted
from ..geometry import ModelFamily
from ..models import Hypothesis

logger = logging.getLogger('preference')


def hypothesis_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per hypothesis, so the pool does not depend on evaluation order"""
    return np.random.default_rng([int(seed), int(index)])


def sample_pool(data: Any, family: ModelFamily, n: int, seed: int) -> List[Hypothesis]:
    """
    Draw n size-b subsets uniformly at random and fit a model to each.

    Degenerate subsets are redrawn from the same stream; the whole pool may
    spend at most REDRAW_FACTOR · n draws before PoolExhausted.
    """
    X = family.validate_data(data)
    m = X.shape[0]
    if m < family.b:
        raise InvalidParams(f"{family.name} needs at least {family.b} data, got {m}")
    if n < 1:
        raise InvalidParams(f"Pool size must be at least 1, got {n}")
    if seed < 0:
        raise InvalidParams(f"seed must be nonnegative, got {seed}")

    budget = REDRAW_FACTOR * n
    draws = 0
    degenerate = 0
    pool: List[Hypothesis] = []
    for j in range(n):
        rng = hypothesis_rng(seed, j)
        while True:
            if draws >= budget:
                raise PoolExhausted(
                    f"{draws} draws spent for {len(pool)}/{n} {family.name} hypotheses "
                    f"({degenerate} degenerate samples)"
                )
            draws += 1
            indices = np.sort(rng.choice(m, size=family.b, replace=False))
            try:
                params = family.fit_minimal(X[indices])
            except DegenerateSample:
                degenerate += 1
                continue
            pool.append(Hypothesis(params=params, sample_indices=tuple(int(i) for i in indices)))
            break

    if degenerate:
        logger.info(f"Redrew {degenerate} degenerate {family.name} samples")
    logger.debug(f"Sampled {n} {family.name} hypotheses from {m} data (seed {seed})")
    return pool
