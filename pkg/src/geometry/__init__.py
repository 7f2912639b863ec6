"""
Geometry component initialization
Exposes main interfaces
"""
from typing import Dict

from ..errors import InvalidParams
from .base import (
    ModelFamily, residual, soft_membership, memberships,
    fit_minimal, fit_weighted, weighted_objective
)
from .lines import Line2D
from .circles import Circle2D
from .projective import Homography2D, Fundamental, hartley_transform, rank_two

FAMILIES: Dict[str, ModelFamily] = {
    family.name: family
    for family in (Line2D(), Circle2D(), Homography2D(), Fundamental())
}


def get_family(name: str) -> ModelFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise InvalidParams(
            f"Unknown model family '{name}', expected one of {sorted(FAMILIES)}"
        ) from None


__all__ = [
    'ModelFamily',
    'Line2D',
    'Circle2D',
    'Homography2D',
    'Fundamental',
    'FAMILIES',
    'get_family',
    'residual',
    'soft_membership',
    'memberships',
    'fit_minimal',
    'fit_weighted',
    'weighted_objective',
    'hartley_transform',
    'rank_two'
]
